#include "logscar/hermite.hpp"

#include "logscar/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace logscar {

namespace {

constexpr double kPruneRelative = 1e-14;

void prune(SqueezedHermiteState::Coeffs& c) {
    double mx = 0.0;
    for (const auto& [m, v] : c) mx = std::max(mx, std::abs(v));
    const double cut = kPruneRelative * mx;
    for (auto it = c.begin(); it != c.end();) {
        if (std::abs(it->second) <= cut) it = c.erase(it);
        else ++it;
    }
}

void check_hbar(double hbar) {
    if (!(hbar > 0.0 && hbar <= 1.0)) throw ConfigError("hbar must lie in (0, 1]");
}

} // namespace

SqueezedHermiteState::SqueezedHermiteState(double hbar, std::vector<double> squeeze, Coeffs coeffs, Complex phase)
    : hbar_(hbar), squeeze_(std::move(squeeze)), coeffs_(std::move(coeffs)), phase_(phase) {
    check_hbar(hbar_);
    if (squeeze_.empty()) throw ConfigError("state dimension must be >= 1");
    for (const auto& [m, v] : coeffs_)
        if (m.size() != dim()) throw ConfigError("coefficient multi-index has wrong length");
    prune(coeffs_);
}

Complex SqueezedHermiteState::amplitude(const MultiIndex& m) const {
    auto it = coeffs_.find(m);
    return it == coeffs_.end() ? Complex{} : phase_ * it->second;
}

double SqueezedHermiteState::norm_sq() const {
    double s = 0.0;
    for (const auto& [m, v] : coeffs_) s += std::norm(v);
    return s * std::norm(phase_);
}

double SqueezedHermiteState::norm() const { return std::sqrt(norm_sq()); }

SqueezedHermiteState SqueezedHermiteState::normalized() const {
    const double n = norm();
    if (n == 0.0) throw NumericalError("cannot normalize the zero state");
    return scale(*this, 1.0 / n);
}

bool SqueezedHermiteState::has_zero_squeeze() const {
    return std::all_of(squeeze_.begin(), squeeze_.end(), [](double s) { return s == 0.0; });
}

int SqueezedHermiteState::max_index(int axis) const {
    int mx = 0;
    for (const auto& [m, v] : coeffs_) mx = std::max(mx, m[axis]);
    return mx;
}

SqueezedHermiteState ground_state(double hbar, int r) {
    check_hbar(hbar);
    if (r < 1) throw ConfigError("dimension r must be >= 1");
    return basis_state(hbar, MultiIndex::zero(r));
}

SqueezedHermiteState basis_state(double hbar, const MultiIndex& m) {
    SqueezedHermiteState::Coeffs c;
    c[m] = 1.0;
    return {hbar, std::vector<double>(static_cast<std::size_t>(m.size()), 0.0), std::move(c)};
}

SqueezedHermiteState raise(const SqueezedHermiteState& state, int axis) {
    if (axis < 0 || axis >= state.dim()) throw ConfigError("axis out of range");
    if (!state.has_zero_squeeze()) throw ConfigError("ladder operators act in the unsqueezed frame");
    SqueezedHermiteState::Coeffs out;
    for (const auto& [m, v] : state.coeffs()) out[m.shifted(axis, 1)] += std::sqrt(m[axis] + 1.0) * v;
    return {state.hbar(), state.squeeze(), std::move(out), state.phase()};
}

SqueezedHermiteState lower(const SqueezedHermiteState& state, int axis) {
    if (axis < 0 || axis >= state.dim()) throw ConfigError("axis out of range");
    if (!state.has_zero_squeeze()) throw ConfigError("ladder operators act in the unsqueezed frame");
    SqueezedHermiteState::Coeffs out;
    for (const auto& [m, v] : state.coeffs())
        if (m[axis] > 0) out[m.shifted(axis, -1)] += std::sqrt(static_cast<double>(m[axis])) * v;
    return {state.hbar(), state.squeeze(), std::move(out), state.phase()};
}

SqueezedHermiteState dilate(const SqueezedHermiteState& state, const std::vector<double>& logs) {
    if (static_cast<int>(logs.size()) != state.dim()) throw ConfigError("dilation length must equal r");
    std::vector<double> sq = state.squeeze();
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] += logs[i];
    return {state.hbar(), std::move(sq), state.coeffs(), state.phase()};
}

SqueezedHermiteState scale(const SqueezedHermiteState& state, Complex factor) {
    const double a = std::abs(factor);
    if (std::abs(a - 1.0) < 1e-15) return {state.hbar(), state.squeeze(), state.coeffs(), state.phase() * factor};
    SqueezedHermiteState::Coeffs c = state.coeffs();
    for (auto& [m, v] : c) v *= factor;
    return {state.hbar(), state.squeeze(), std::move(c), state.phase()};
}

SqueezedHermiteState add(const SqueezedHermiteState& a, const SqueezedHermiteState& b) {
    if (a.hbar() != b.hbar() || a.squeeze() != b.squeeze())
        throw ConfigError("add requires equal hbar and squeeze");
    SqueezedHermiteState::Coeffs c;
    const Complex pa = a.phase(), pb = b.phase();
    const bool same = pa == pb;
    for (const auto& [m, v] : a.coeffs()) c[m] += same ? v : pa * v;
    for (const auto& [m, v] : b.coeffs()) c[m] += same ? v : pb * v;
    return {a.hbar(), a.squeeze(), std::move(c), same ? pa : Complex{1.0, 0.0}};
}

double log_cosh(double s) {
    const double a = std::abs(s);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

Eigen::MatrixXd squeeze_overlaps(double s, int rows, int cols) {
    if (rows < 1 || cols < 1) throw ConfigError("overlap block must be nonempty");
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
    const double th = std::tanh(s);
    const double lc = log_cosh(s);
    const double sech = std::exp(-lc);
    const double m00 = std::exp(-0.5 * lc);

    // first column and first row from the ground-state recurrences
    M(0, 0) = m00;
    for (int m = 1; m + 1 < rows; m += 2) M(m + 1, 0) = th * std::sqrt(m / (m + 1.0)) * M(m - 1, 0);
    std::vector<double> row0(static_cast<std::size_t>(cols), 0.0);
    row0[0] = m00;
    for (int n = 1; n + 1 < cols; n += 2) row0[n + 1] = -th * std::sqrt(n / (n + 1.0)) * row0[n - 1];

    // M_{m+1,n} = (tanh s sqrt(m) M_{m-1,n} + sqrt(n) sech s M_{m,n-1}) / sqrt(m+1)
    for (int n = 1; n < cols; ++n) {
        M(0, n) = row0[n];
        for (int m = 0; m + 1 < rows; ++m) {
            double v = std::sqrt(static_cast<double>(n)) * sech * M(m, n - 1);
            if (m > 0) v += th * std::sqrt(static_cast<double>(m)) * M(m - 1, n);
            M(m + 1, n) = v / std::sqrt(m + 1.0);
        }
    }
    return M;
}

Complex inner_product(const SqueezedHermiteState& a, const SqueezedHermiteState& b) {
    if (a.hbar() != b.hbar()) throw ConfigError("inner product requires equal hbar");
    if (a.dim() != b.dim()) throw ConfigError("inner product requires equal dimension");
    if (a.empty() || b.empty()) return {};
    const int r = a.dim();
    bool same = true;
    for (int i = 0; i < r; ++i) same = same && a.squeeze()[i] == b.squeeze()[i];
    Complex acc{};
    if (same) {
        for (const auto& [m, v] : b.coeffs()) {
            auto it = a.coeffs().find(m);
            if (it != a.coeffs().end()) acc += std::conj(it->second) * v;
        }
    } else {
        std::vector<Eigen::MatrixXd> mats;
        for (int i = 0; i < r; ++i)
            mats.push_back(squeeze_overlaps(b.squeeze()[i] - a.squeeze()[i], a.max_index(i) + 1, b.max_index(i) + 1));
        for (const auto& [m, u] : a.coeffs()) {
            Complex row{};
            for (const auto& [n, v] : b.coeffs()) {
                double w = 1.0;
                for (int i = 0; i < r && w != 0.0; ++i) w *= mats[i](m[i], n[i]);
                row += w * v;
            }
            acc += std::conj(u) * row;
        }
    }
    return std::conj(a.phase()) * b.phase() * acc;
}

std::vector<double> hermite_functions(double x, double hbar, int nmax) {
    std::vector<double> out(static_cast<std::size_t>(nmax) + 1, 0.0);
    const double y = x / std::sqrt(hbar);
    constexpr double kBig = 1e150;
    const double logBig = std::log(kBig);
    double logscale = -0.5 * y * y - 0.25 * std::log(std::numbers::pi * hbar);
    double prev = 0.0, cur = 1.0;
    out[0] = std::exp(logscale);
    for (int m = 0; m < nmax; ++m) {
        double next = std::sqrt(2.0 / (m + 1.0)) * y * cur - std::sqrt(m / (m + 1.0)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > kBig) {
            cur /= kBig;
            prev /= kBig;
            logscale += logBig;
        }
        out[static_cast<std::size_t>(m) + 1] = logscale < -745.0 ? 0.0 : cur * std::exp(logscale);
    }
    return out;
}

std::vector<Complex> evaluate(const SqueezedHermiteState& state, const std::vector<std::vector<double>>& points) {
    const int r = state.dim();
    std::vector<int> mx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) mx[i] = state.max_index(i);
    double pref = 1.0;
    for (double s : state.squeeze()) pref *= std::exp(-0.5 * s);
    std::vector<Complex> out;
    out.reserve(points.size());
    std::vector<std::vector<double>> phi(static_cast<std::size_t>(r));
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != r) throw ConfigError("evaluation point has wrong length");
        for (int i = 0; i < r; ++i) phi[i] = hermite_functions(std::exp(-state.squeeze()[i]) * p[i], state.hbar(), mx[i]);
        Complex acc{};
        for (const auto& [m, v] : state.coeffs()) {
            double w = 1.0;
            for (int i = 0; i < r; ++i) w *= phi[i][m[i]];
            acc += w * v;
        }
        out.push_back(state.phase() * pref * acc);
    }
    return out;
}

std::vector<Complex> evaluate_1d(const SqueezedHermiteState& state, const std::vector<double>& xs) {
    std::vector<std::vector<double>> pts;
    pts.reserve(xs.size());
    for (double x : xs) pts.push_back({x});
    return evaluate(state, pts);
}

SqueezedHermiteState unsqueeze(const SqueezedHermiteState& state, int cap, double* discarded) {
    const int r = state.dim();
    std::vector<double> zero(static_cast<std::size_t>(r), 0.0);
    if (state.has_zero_squeeze()) {
        SqueezedHermiteState::Coeffs c;
        for (const auto& [m, v] : state.coeffs())
            if (m.max_entry() < cap) c[m] = v;
        SqueezedHermiteState out(state.hbar(), zero, std::move(c), state.phase());
        if (discarded) *discarded = std::max(0.0, state.norm_sq() - out.norm_sq());
        return out;
    }
    std::vector<Eigen::MatrixXd> mats;
    for (int i = 0; i < r; ++i) mats.push_back(squeeze_overlaps(state.squeeze()[i], cap, state.max_index(i) + 1));
    SqueezedHermiteState::Coeffs c;
    if (r == 1) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(state.max_index(0) + 1);
        for (const auto& [n, a] : state.coeffs()) v(n[0]) = a;
        Eigen::VectorXcd w = mats[0] * v;
        for (int m = 0; m < cap; ++m) c[MultiIndex{m}] = w(m);
    } else {
        const std::size_t dim = tensor_dim(r, cap);
        for (std::size_t idx = 0; idx < dim; ++idx) {
            MultiIndex m = from_linear_index(idx, r, cap);
            Complex acc{};
            for (const auto& [n, a] : state.coeffs()) {
                double w = 1.0;
                for (int i = 0; i < r && w != 0.0; ++i) w *= mats[i](m[i], n[i]);
                acc += w * a;
            }
            c[m] = acc;
        }
    }
    SqueezedHermiteState out(state.hbar(), zero, std::move(c), state.phase());
    if (discarded) *discarded = std::max(0.0, state.norm_sq() - out.norm_sq());
    return out;
}

SqueezedHermiteState unsqueeze_to_tolerance(const SqueezedHermiteState& state, double tol, int max_cap, int* cap_used) {
    int cap = 16;
    for (int i = 0; i < state.dim(); ++i) cap = std::max(cap, state.max_index(i) + 8);
    const double total = state.norm_sq();
    while (true) {
        double disc = 0.0;
        SqueezedHermiteState out = unsqueeze(state, cap, &disc);
        if (disc <= tol * total) {
            if (cap_used) *cap_used = cap;
            return out;
        }
        if (cap >= max_cap)
            throw NumericalError("unsqueezed expansion needs more than " + std::to_string(max_cap) + " modes");
        cap = std::min(max_cap, cap * 3 / 2 + 8);
    }
}

Eigen::VectorXcd to_vector(const SqueezedHermiteState& state, int cap) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(tensor_dim(state.dim(), cap)));
    for (const auto& [m, a] : state.coeffs()) v(static_cast<Eigen::Index>(linear_index(m, cap))) = state.phase() * a;
    return v;
}

SqueezedHermiteState from_vector(double hbar, const std::vector<double>& squeeze, const Eigen::VectorXcd& v, int cap) {
    const int r = static_cast<int>(squeeze.size());
    if (static_cast<std::size_t>(v.size()) != tensor_dim(r, cap)) throw ConfigError("vector length does not match cap^r");
    SqueezedHermiteState::Coeffs c;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v(i) != Complex{}) c.emplace(from_linear_index(static_cast<std::size_t>(i), r, cap), v(i));
    return {hbar, squeeze, std::move(c)};
}

} // namespace logscar
