#include "logscar/quasimode.hpp"

#include "logscar/error.hpp"
#include "logscar/quantize.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace logscar {

namespace {

// Overlap matrix <phi_m, D_s phi_n> on the tensor basis, s = d * step * lambda.
Eigen::MatrixXd tensor_overlaps(const std::vector<double>& s, int cap) {
    Eigen::MatrixXd m = squeeze_overlaps(s[0], cap, cap);
    for (std::size_t i = 1; i < s.size(); ++i) {
        const Eigen::MatrixXd b = squeeze_overlaps(s[i], cap, cap);
        Eigen::MatrixXd k(m.rows() * cap, m.cols() * cap);
        for (Eigen::Index p = 0; p < m.rows(); ++p)
            for (Eigen::Index q = 0; q < m.cols(); ++q) k.block(p * cap, q * cap, cap, cap) = m(p, q) * b;
        m = std::move(k);
    }
    return m;
}

double gram_form(const std::vector<double>& lambda, double step, const std::vector<Complex>& coeffs,
                 const std::vector<SqueezedHermiteState>& states) {
    const std::size_t n = states.size();
    if (n == 0) return 0.0;
    const int r = static_cast<int>(lambda.size());
    int cap = 1;
    for (const auto& s : states)
        for (int i = 0; i < r; ++i) cap = std::max(cap, s.max_index(i) + 1);
    const auto dim = static_cast<Eigen::Index>(tensor_dim(r, cap));
    Eigen::MatrixXcd Y(dim, static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) Y.col(static_cast<Eigen::Index>(j)) = coeffs[j] * to_vector(states[j], cap);
    const double ysq = Y.squaredNorm();
    if (ysq == 0.0) return 0.0;
    double acc = Y.squaredNorm();  // d = 0: D_0 is the identity
    for (std::size_t d = 1; d < n; ++d) {
        std::vector<double> s(lambda.size());
        for (std::size_t i = 0; i < lambda.size(); ++i) s[i] = lambda[i] * step * static_cast<double>(d);
        const Eigen::MatrixXd M = tensor_overlaps(s, cap);
        const auto len = static_cast<Eigen::Index>(n - d);
        const Eigen::MatrixXcd P = M.cast<Complex>() * Y.rightCols(len);
        const Complex part = (Y.leftCols(len).conjugate().cwiseProduct(P)).sum();
        acc += 2.0 * part.real();
        if (M.norm() * ysq < 1e-17 * std::abs(acc)) break;
    }
    return acc;
}

struct Grid {
    double step;
    std::vector<double> times;
};

Grid make_grid(double half_length, int J) {
    Grid g{half_length / J, {}};
    for (int j = -J; j <= J; ++j) g.times.push_back(j * g.step);
    return g;
}

} // namespace

SqueezedHermiteState AveragedState::node(std::size_t j) const {
    std::vector<double> logs(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) logs[i] = lambda[i] * times[j];
    return scale(dilate(inner[j], logs), weights[j]);
}

SqueezedHermiteState AveragedState::expand(int cap) const {
    const int r = static_cast<int>(lambda.size());
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(tensor_dim(r, cap)));
    for (std::size_t j = 0; j < size(); ++j) {
        if (weights[j] == Complex{}) continue;
        acc += to_vector(unsqueeze(node(j), cap), cap);
    }
    return from_vector(hbar, std::vector<double>(static_cast<std::size_t>(r), 0.0), acc, cap);
}

double averaged_norm_sq(const AveragedState& psi, const std::vector<SqueezedHermiteState>& states) {
    return gram_form(psi.lambda, psi.step, psi.weights, states);
}

AveragedState time_average(const EvolutionPlan& plan, const CutoffProfile& chi, double T, double f_over_hbar) {
    if (!(T > 0.0)) throw ConfigError("averaging time must be positive");
    const double half = T * chi.support();
    FullPropagator prop(plan, half);
    const double f = f_over_hbar * plan.hbar;
    PolySymbol shifted = plan.resonant - PolySymbol::constant(plan.resonant.dim(), f);

    AveragedState out;
    double prev_norm = -1.0, prev_width = -1.0;
    for (int J = 16, it = 0; J <= (1 << 15); J *= 2, ++it) {
        const Grid g = make_grid(half, J);
        AveragedState cur;
        cur.hbar = plan.hbar;
        cur.lambda = plan.lambda;
        cur.T = T;
        cur.b = f_over_hbar;
        cur.step = g.step;
        cur.times = g.times;
        cur.resonant = plan.resonant;
        std::vector<SqueezedHermiteState> images;
        for (double t : g.times) {
            cur.weights.push_back(g.step * chi.value(t / T) * std::exp(Complex{0.0, t * f_over_hbar}));
            cur.inner.push_back(prop.inner(t));
            images.push_back(apply_weyl(shifted, cur.inner.back()));
        }
        cur.norm_sq = gram_form(cur.lambda, cur.step, cur.weights, cur.inner);
        cur.width_sq = gram_form(cur.lambda, cur.step, cur.weights, images);
        cur.refinements = it;
        const bool done = prev_norm > 0.0 && std::abs(cur.norm_sq - prev_norm) <= 1e-8 * cur.norm_sq &&
                          std::abs(std::sqrt(cur.width_sq) - prev_width) <= 1e-6 * std::sqrt(cur.width_sq);
        prev_norm = cur.norm_sq;
        prev_width = std::sqrt(cur.width_sq);
        out = std::move(cur);
        if (done) return out;
    }
    throw NumericalError("time-average quadrature did not converge");
}

double ibp_width(const AveragedState& psi, const CutoffProfile& chi) {
    std::vector<Complex> c;
    for (double t : psi.times)
        c.push_back(psi.step * Complex{0.0, -psi.hbar} * chi.derivative(t / psi.T) / psi.T *
                    std::exp(Complex{0.0, t * psi.b}));
    const double w2 = gram_form(psi.lambda, psi.step, c, psi.inner);
    return std::sqrt(std::max(0.0, w2) / psi.norm_sq);
}

double s_function(const std::vector<double>& lambda, double b, int r) {
    std::vector<double> lam = lambda;
    if (lam.size() == 1 && r > 1) lam.assign(static_cast<std::size_t>(r), lambda[0]);
    if (static_cast<int>(lam.size()) != r) throw ConfigError("rate vector length must equal r");
    for (double l : lam)
        if (!(l > 0.0)) throw ConfigError("rates must be positive");
    auto f = [&](double s) {
        double lc = 0.0;
        for (double l : lam) lc += log_cosh(l * s);
        return std::cos(b * s) * std::exp(-0.5 * lc);
    };
    double err = 0.0;
    const double half = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, 0.0, std::numeric_limits<double>::infinity(), 20, 1e-14, &err);
    return 2.0 * half;
}

double spectral_width(const AveragedState& psi, double center) {
    if (center == psi.b * psi.hbar && psi.width_sq > 0.0) return std::sqrt(psi.width_sq / psi.norm_sq);
    const PolySymbol q = psi.resonant - PolySymbol::constant(psi.resonant.dim(), center);
    std::vector<SqueezedHermiteState> images;
    for (const auto& u : psi.inner) images.push_back(apply_weyl(q, u));
    return std::sqrt(std::max(0.0, gram_form(psi.lambda, psi.step, psi.weights, images)) / psi.norm_sq);
}

double spectral_width(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& v, double center) {
    const double n = v.norm();
    if (n == 0.0) throw NumericalError("width of the zero vector is undefined");
    return (H * v - center * v).norm() / n;
}

SpectralProjection spectral_project(const HermitianPropagator& eig, const Eigen::VectorXcd& v, double center,
                                    double half_width) {
    if (!(half_width >= 0.0)) throw ConfigError("half width must be nonnegative");
    const double n = v.norm();
    if (n == 0.0) throw NumericalError("cannot project the zero vector");
    const Eigen::VectorXcd c = eig.eigenvectors().adjoint() * (v / n);
    SpectralProjection out;
    out.state = Eigen::VectorXcd::Zero(v.size());
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (std::abs(eig.eigenvalues()(i) - center) > half_width) continue;
        out.retained_mass += std::norm(c(i));
        out.state += c(i) * eig.eigenvectors().col(i);
        ++out.eigen_count;
    }
    if (out.retained_mass > 0.0) out.state /= std::sqrt(out.retained_mass);
    return out;
}

SpectralProjection spectral_project(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& v, double center,
                                    double half_width) {
    return spectral_project(HermitianPropagator(H), v, center, half_width);
}

double width_constant(double lambda_max, double epsilon2) {
    return std::numbers::pi * lambda_max * (1.0 + 3.0 * epsilon2);
}

QuasimodeReport quasimode_report(const EvolutionPlan& plan, const CutoffProfile& chi, double E0, double f_over_hbar,
                                 double epsilon3, int max_projection_cap) {
    QuasimodeReport rep;
    const double lmax = *std::max_element(plan.lambda.begin(), plan.lambda.end());
    rep.hbar = plan.hbar;
    rep.T = ehrenfest_time(plan);
    rep.central_energy = E0 + f_over_hbar * plan.hbar;
    const AveragedState psi = time_average(plan, chi, rep.T, f_over_hbar);
    rep.measured_width = std::sqrt(psi.width_sq / psi.norm_sq);
    rep.cutoff_ratio = chi.ratio();
    rep.predicted_width = plan.hbar / rep.T * chi.ratio();
    rep.width_bound = width_constant(lmax, plan.epsilon2) * plan.hbar / std::abs(std::log(plan.hbar));
    rep.norm_sq = psi.norm_sq;
    rep.S_value = s_function(plan.lambda, f_over_hbar, static_cast<int>(plan.lambda.size()));
    rep.predicted_norm_sq = rep.T * rep.S_value * chi.l2_norm() * chi.l2_norm();
    const double C = width_constant(lmax, plan.epsilon2);
    rep.window_half_width = (epsilon3 > 0.0 ? epsilon3 : C / 4.0) * plan.hbar / std::abs(std::log(plan.hbar));
    // anti-Wick mass outside hbar^{epsilon2/3}, when the expansion is affordable
    if (plan.lambda.size() == 1) {
        const double smax = lmax * rep.T * chi.support();
        const double gap = 1.0 - std::tanh(smax);
        const double need = 40.0 / std::max(gap, 1e-300);
        if (need < 200000.0) {
            int cap = static_cast<int>(need) + 64;
            for (const auto& u : psi.inner) cap = std::max(cap, u.max_index(0) + 64);
            const SqueezedHermiteState e = psi.expand(cap);
            const double lost = std::max(0.0, psi.norm_sq - e.norm_sq());
            const double radius = std::pow(plan.hbar, plan.epsilon2 / 3.0);
            rep.mass_outside = std::min(1.0, microlocal_mass_outside(e, radius) * e.norm_sq() / psi.norm_sq +
                                                 lost / psi.norm_sq);
            rep.expansion_cap = cap;
            if (cap <= max_projection_cap) {
                const double f = f_over_hbar * plan.hbar;
                const PolySymbol q = plan.resonant - PolySymbol::constant(1, f);
                Eigen::MatrixXcd H = quantize(q, plan.hbar, cap).entries;
                H = 0.5 * (H + H.adjoint()).eval();
                rep.retained_mass = spectral_project(H, to_vector(e, cap), 0.0, rep.window_half_width).retained_mass;
            }
        }
    }
    return rep;
}

} // namespace logscar
