#include "logscar/symbol.hpp"

#include "logscar/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace logscar {

namespace {

double falling(int n, int j) {
    double f = 1.0;
    for (int i = 0; i < j; ++i) f *= static_cast<double>(n - i);
    return f;
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

void check_dims(const PolySymbol& p, const PolySymbol& q) {
    if (p.dim() != q.dim()) throw ConfigError("symbols have different dimension r");
}

// One axis contribution of a Moyal term: exponents after differentiation and the
// numeric factor, for jp derivatives of type (d_x p, d_xi q) and jm of type (d_xi p, d_x q).
struct AxisTerm {
    int x_exp;
    int xi_exp;
    int order;
    double factor;
};

std::vector<AxisTerm> axis_terms(int a, int b, int c, int d) {
    std::vector<AxisTerm> out;
    for (int jp = 0; jp <= std::min(a, d); ++jp)
        for (int jm = 0; jm <= std::min(b, c); ++jm) {
            double f = falling(a, jp) * falling(d, jp) * falling(b, jm) * falling(c, jm) /
                       (factorial(jp) * factorial(jm));
            if (jm % 2) f = -f;
            out.push_back({a + c - jp - jm, b + d - jp - jm, jp + jm, f});
        }
    return out;
}

// Moyal series; parity 0 keeps all orders, 1 keeps odd orders only.
PolySymbol moyal_series(const PolySymbol& p, const PolySymbol& q, std::optional<int> max_weight, int hbar_weight,
                        int parity) {
    check_dims(p, q);
    const int r = p.dim();
    PolySymbol out(r);
    std::vector<int> xe(static_cast<std::size_t>(r)), xie(static_cast<std::size_t>(r));
    std::vector<std::vector<AxisTerm>> per_axis(static_cast<std::size_t>(r));
    std::vector<std::size_t> pos(static_cast<std::size_t>(r));
    const Complex ihalf{0.0, 0.5};
    std::vector<Complex> ipow(64);
    ipow[0] = 1.0;
    for (std::size_t i = 1; i < ipow.size(); ++i) ipow[i] = ipow[i - 1] * ihalf;

    for (const auto& [kp, cp] : p.terms()) {
        for (const auto& [kq, cq] : q.terms()) {
            const int k0 = kp.k + kq.k;
            for (int i = 0; i < r; ++i) per_axis[i] = axis_terms(kp.alpha[i], kp.beta[i], kq.alpha[i], kq.beta[i]);
            std::fill(pos.begin(), pos.end(), 0);
            while (true) {
                int order = 0;
                double f = 1.0;
                int degree = 0;
                for (int i = 0; i < r; ++i) {
                    const AxisTerm& t = per_axis[i][pos[i]];
                    order += t.order;
                    f *= t.factor;
                    xe[i] = t.x_exp;
                    xie[i] = t.xi_exp;
                    degree += t.x_exp + t.xi_exp;
                }
                const bool parity_ok = parity == 0 || (order % 2 == 1);
                const int w = degree + hbar_weight * (k0 + order);
                if (parity_ok && f != 0.0 && (!max_weight || w <= *max_weight)) {
                    SymbolKey key{MultiIndex(xe), MultiIndex(xie), k0 + order};
                    out.add_term(key, cp * cq * f * ipow[static_cast<std::size_t>(order)]);
                }
                int ax = 0;
                while (ax < r) {
                    if (++pos[ax] < per_axis[ax].size()) break;
                    pos[ax] = 0;
                    ++ax;
                }
                if (ax == r) break;
            }
        }
    }
    return out;
}

} // namespace

int weight(const SymbolKey& key, int hbar_weight) { return key.alpha.total() + key.beta.total() + hbar_weight * key.k; }

PolySymbol::PolySymbol(int r) : r_(r) {
    if (r < 1) throw ConfigError("symbol dimension r must be >= 1");
}

PolySymbol::PolySymbol(int r, Terms terms) : PolySymbol(r) {
    for (const auto& [k, c] : terms) add_term(k, c);
}

PolySymbol PolySymbol::constant(int r, Complex c) {
    PolySymbol p(r);
    p.add_term({MultiIndex::zero(r), MultiIndex::zero(r), 0}, c);
    return p;
}

PolySymbol PolySymbol::monomial(const MultiIndex& alpha, const MultiIndex& beta, int k, Complex c) {
    if (alpha.size() != beta.size()) throw ConfigError("alpha and beta lengths differ");
    if (k < 0) throw ConfigError("hbar power must be nonnegative");
    PolySymbol p(alpha.size());
    p.add_term({alpha, beta, k}, c);
    return p;
}

PolySymbol PolySymbol::x(int r, int axis) { return monomial(MultiIndex::unit(r, axis), MultiIndex::zero(r), 0, 1.0); }

PolySymbol PolySymbol::xi(int r, int axis) { return monomial(MultiIndex::zero(r), MultiIndex::unit(r, axis), 0, 1.0); }

void PolySymbol::add_term(const SymbolKey& key, Complex c) {
    if (key.alpha.size() != r_ || key.beta.size() != r_) throw ConfigError("term has wrong dimension");
    if (key.k < 0) throw ConfigError("hbar power must be nonnegative");
    if (c == Complex{}) return;
    auto [it, inserted] = terms_.emplace(key, c);
    if (!inserted) {
        it->second += c;
        if (it->second == Complex{}) terms_.erase(it);
    }
}

Complex PolySymbol::coeff(const SymbolKey& key) const {
    auto it = terms_.find(key);
    return it == terms_.end() ? Complex{} : it->second;
}

int PolySymbol::min_weight(int hbar_weight) const {
    int w = -1;
    for (const auto& [k, c] : terms_) w = (w < 0) ? weight(k, hbar_weight) : std::min(w, weight(k, hbar_weight));
    return w;
}

int PolySymbol::max_weight(int hbar_weight) const {
    int w = -1;
    for (const auto& [k, c] : terms_) w = std::max(w, weight(k, hbar_weight));
    return w;
}

int PolySymbol::max_axis_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_)
        for (int i = 0; i < r_; ++i) d = std::max(d, k.alpha[i] + k.beta[i]);
    return d;
}

int PolySymbol::max_hbar_power() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.k);
    return d;
}

PolySymbol PolySymbol::filtered(const std::function<bool(const SymbolKey&, Complex)>& keep) const {
    PolySymbol out(r_);
    for (const auto& [k, c] : terms_)
        if (keep(k, c)) out.terms_.emplace(k, c);
    return out;
}

PolySymbol PolySymbol::weight_part(int w, int hbar_weight) const {
    return filtered([&](const SymbolKey& k, Complex) { return weight(k, hbar_weight) == w; });
}

PolySymbol PolySymbol::truncated(int max_weight, int hbar_weight) const {
    return filtered([&](const SymbolKey& k, Complex) { return weight(k, hbar_weight) <= max_weight; });
}

PolySymbol PolySymbol::chopped(double tol) const {
    return filtered([&](const SymbolKey&, Complex c) { return std::abs(c) > tol; });
}

double PolySymbol::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
    return m;
}

bool PolySymbol::is_real(double tol) const {
    const double scale = std::max(max_abs_coeff(), 1e-300);
    for (const auto& [k, c] : terms_)
        if (std::abs(c.imag()) > tol * scale) return false;
    return true;
}

PolySymbol PolySymbol::operator+(const PolySymbol& o) const {
    PolySymbol out = *this;
    out += o;
    return out;
}

PolySymbol& PolySymbol::operator+=(const PolySymbol& o) {
    check_dims(*this, o);
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
}

PolySymbol PolySymbol::operator-(const PolySymbol& o) const { return *this + (-o); }

PolySymbol PolySymbol::operator-() const { return *this * Complex{-1.0, 0.0}; }

PolySymbol PolySymbol::operator*(Complex c) const {
    PolySymbol out(r_);
    if (c == Complex{}) return out;
    for (const auto& [k, v] : terms_) out.terms_.emplace(k, v * c);
    return out;
}

std::string PolySymbol::str(int precision) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(precision);
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (c.imag() == 0.0) os << c.real();
        else os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
        for (int i = 0; i < r_; ++i) {
            if (k.alpha[i] == 1) os << "*x" << i;
            else if (k.alpha[i] > 1) os << "*x" << i << "^" << k.alpha[i];
        }
        for (int i = 0; i < r_; ++i) {
            if (k.beta[i] == 1) os << "*xi" << i;
            else if (k.beta[i] > 1) os << "*xi" << i << "^" << k.beta[i];
        }
        if (k.k == 1) os << "*h";
        else if (k.k > 1) os << "*h^" << k.k;
    }
    return os.str();
}

PolySymbol multiply(const PolySymbol& p, const PolySymbol& q) {
    check_dims(p, q);
    PolySymbol out(p.dim());
    for (const auto& [kp, cp] : p.terms())
        for (const auto& [kq, cq] : q.terms()) out.add_term({kp.alpha + kq.alpha, kp.beta + kq.beta, kp.k + kq.k}, cp * cq);
    return out;
}

PolySymbol moyal_product(const PolySymbol& p, const PolySymbol& q, std::optional<int> max_weight, int hbar_weight) {
    return moyal_series(p, q, max_weight, hbar_weight, 0);
}

PolySymbol moyal_bracket(const PolySymbol& g, const PolySymbol& p, std::optional<int> max_weight, int hbar_weight) {
    // g#p - p#g keeps twice the odd orders; each carries hbar^order with order >= 1.
    // The weight cap applies after division by hbar.
    std::optional<int> cap;
    if (max_weight) cap = *max_weight + hbar_weight;
    PolySymbol odd = moyal_series(g, p, cap, hbar_weight, 1);
    PolySymbol out(g.dim());
    for (const auto& [k, c] : odd.terms()) {
        if (k.k < 1) throw NumericalError("internal: odd Moyal term without hbar");
        out.add_term({k.alpha, k.beta, k.k - 1}, Complex{0.0, 2.0} * c);
    }
    return out;
}

PolySymbol derivative_x(const PolySymbol& p, int axis) {
    PolySymbol out(p.dim());
    for (const auto& [k, c] : p.terms())
        if (k.alpha[axis] > 0) out.add_term({k.alpha.shifted(axis, -1), k.beta, k.k}, c * static_cast<double>(k.alpha[axis]));
    return out;
}

PolySymbol derivative_xi(const PolySymbol& p, int axis) {
    PolySymbol out(p.dim());
    for (const auto& [k, c] : p.terms())
        if (k.beta[axis] > 0) out.add_term({k.alpha, k.beta.shifted(axis, -1), k.k}, c * static_cast<double>(k.beta[axis]));
    return out;
}

PolySymbol poisson_bracket(const PolySymbol& p, const PolySymbol& q) {
    check_dims(p, q);
    PolySymbol out(p.dim());
    for (int i = 0; i < p.dim(); ++i) {
        out += multiply(derivative_xi(p, i), derivative_x(q, i));
        out += -multiply(derivative_x(p, i), derivative_xi(q, i));
    }
    return out;
}

double grading_eigenvalue(const MultiIndex& alpha, const MultiIndex& beta, const std::vector<double>& lambda) {
    if (alpha.size() != beta.size() || static_cast<int>(lambda.size()) != alpha.size())
        throw ConfigError("grading_eigenvalue: length mismatch");
    double s = 0.0;
    for (int i = 0; i < alpha.size(); ++i) s += lambda[i] * (alpha[i] - beta[i]);
    return s;
}

Complex evaluate(const PolySymbol& p, const std::vector<double>& x, const std::vector<double>& xi, double hbar) {
    if (static_cast<int>(x.size()) != p.dim() || static_cast<int>(xi.size()) != p.dim())
        throw ConfigError("evaluation point has wrong dimension");
    Complex acc{};
    for (const auto& [k, c] : p.terms()) {
        double v = std::pow(hbar, k.k);
        for (int i = 0; i < p.dim(); ++i) v *= std::pow(x[i], k.alpha[i]) * std::pow(xi[i], k.beta[i]);
        acc += c * v;
    }
    return acc;
}

PolySymbol compose_linear(const PolySymbol& p, const Eigen::MatrixXd& S) {
    const int r = p.dim();
    if (S.rows() != 2 * r || S.cols() != 2 * r) throw ConfigError("linear map must be 2r x 2r");
    // linear forms for x_i and xi_i in the new variables
    std::vector<PolySymbol> forms;
    for (int row = 0; row < 2 * r; ++row) {
        PolySymbol f(r);
        for (int j = 0; j < r; ++j) {
            if (S(row, j) != 0.0) f.add_term({MultiIndex::unit(r, j), MultiIndex::zero(r), 0}, S(row, j));
            if (S(row, r + j) != 0.0) f.add_term({MultiIndex::zero(r), MultiIndex::unit(r, j), 0}, S(row, r + j));
        }
        forms.push_back(std::move(f));
    }
    std::vector<std::vector<PolySymbol>> powers(static_cast<std::size_t>(2 * r));
    auto power = [&](int row, int e) -> const PolySymbol& {
        auto& pw = powers[static_cast<std::size_t>(row)];
        if (pw.empty()) pw.push_back(PolySymbol::constant(r, 1.0));
        while (static_cast<int>(pw.size()) <= e) pw.push_back(multiply(pw.back(), forms[static_cast<std::size_t>(row)]));
        return pw[static_cast<std::size_t>(e)];
    };
    PolySymbol out(r);
    for (const auto& [k, c] : p.terms()) {
        PolySymbol t = PolySymbol::monomial(MultiIndex::zero(r), MultiIndex::zero(r), k.k, c);
        for (int i = 0; i < r; ++i) {
            if (k.alpha[i]) t = multiply(t, power(i, k.alpha[i]));
            if (k.beta[i]) t = multiply(t, power(r + i, k.beta[i]));
        }
        out += t;
    }
    return out;
}

} // namespace logscar
