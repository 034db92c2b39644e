#include "logscar/fermi.hpp"

#include "logscar/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace logscar {

namespace {

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

TransverseField cut_and_normalize(const TransverseGrid& g, const TransverseField& psi, double* loss) {
    const double n0 = weighted_norm(g, psi);
    if (n0 == 0.0) throw NumericalError("transverse field vanishes on the grid");
    const TransverseField cut = upsilon_field(g).cwiseProduct(psi) / n0;
    const double n1 = weighted_norm(g, cut);
    if (loss) *loss = 1.0 - n1 * n1;
    if (n1 == 0.0) throw NumericalError("cutoff removes the whole field");
    return cut / n1;
}

} // namespace

double upsilon(const std::vector<double>& x, double epsilon1) {
    const double a = epsilon1 / 3.0, b = epsilon1 / 2.0;
    double v = 1.0;
    for (double xi : x) v *= smooth_step((b - std::abs(xi)) / (b - a));
    return v;
}

TransverseField upsilon_field(const TransverseGrid& g) {
    TransverseField u(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) u(static_cast<Eigen::Index>(i)) = upsilon(g.point(i), g.epsilon1);
    return u;
}

double hbar0(double epsilon1, double epsilon2) { return std::pow(epsilon1, 2.0 / epsilon2); }

void validate_parameter_order(double epsilon1, double epsilon2, int degree_cap, int l, double hbar) {
    if (!(epsilon1 > 0.0 && epsilon1 <= 0.5)) throw ConfigError("epsilon1 (chosen first) must lie in (0, 0.5]");
    if (!(epsilon2 > 0.0 && epsilon2 < 0.5)) throw ConfigError("epsilon2 (chosen second) must lie in (0, 1/2)");
    if (!((degree_cap + 1) * epsilon2 / 3.0 > 1.0))
        throw ConfigError("degree cap N (chosen third) must satisfy (N+1) epsilon2 / 3 > 1; got N = " +
                          std::to_string(degree_cap));
    if (l < 2) throw ConfigError("Dyson order l (chosen fourth) must be >= 2");
    if (!(hbar > 0.0 && hbar <= hbar0(epsilon1, epsilon2)))
        throw ConfigError("hbar (chosen last) must lie in (0, hbar0] with hbar0 = epsilon1^(2/epsilon2) = " +
                          std::to_string(hbar0(epsilon1, epsilon2)));
}

int mode_for(double L, double hbar) {
    if (!(L > 0.0 && hbar > 0.0)) throw ConfigError("length and hbar must be positive");
    return std::max(1, static_cast<int>(std::lround(L / (2.0 * std::numbers::pi * hbar))));
}

double exact_hbar(double L, int k) { return L / (2.0 * std::numbers::pi * k); }

CollarField build_ansatz(int k, const TransverseField& psi, const CollarGrid& grid, double hbar, bool apply_cutoff) {
    grid.validate();
    const double E0 = std::pow(2.0 * std::numbers::pi * k * hbar / grid.L, 2);
    if (std::abs(E0 - 1.0) > 4.0 * std::numbers::pi * hbar / grid.L + 1e-12)
        throw ConfigError("circle mode k is inconsistent with E0 = 1 at this hbar");
    if (2 * std::abs(k) + 2 > grid.n_s) throw ConfigError("n_s does not resolve the circle mode");
    const TransverseGrid tg = grid.transverse();
    TransverseField t;
    if (apply_cutoff) t = cut_and_normalize(tg, psi, nullptr);
    else t = psi / weighted_norm(tg, psi);
    const std::vector<double> s = grid.s_nodes();
    CollarField out{grid, Eigen::MatrixXcd(grid.n_s, grid.n_x)};
    const double amp = 1.0 / std::sqrt(grid.L);
    for (int i = 0; i < grid.n_s; ++i) {
        const Complex phi = amp * std::exp(Complex{0.0, 2.0 * std::numbers::pi * k * s[i] / grid.L});
        out.values.row(i) = phi * t.transpose();
    }
    return out;
}

CollarField build_ansatz(int k, const TransverseField& psi, const CollarGrid& grid, double hbar) {
    return build_ansatz(k, psi, grid, hbar, true);
}

double husimi_mass_in_ball(const TransverseGrid& g, const TransverseField& psi, double radius, double hbar) {
    if (g.r != 1) throw ConfigError("Husimi strip mass is implemented for r = 1");
    const std::vector<double> x = g.nodes();
    const double sq = std::sqrt(hbar);
    double in = 0.0, total = 0.0;
    for (int j = 0; j < g.n_x; ++j) {
        const double w = std::norm(psi(j));
        total += w;
        in += w * 0.5 * (std::erf((radius - x[j]) / sq) + std::erf((radius + x[j]) / sq));
    }
    if (total == 0.0) throw NumericalError("mass of the zero field is undefined");
    return in / total;
}

ResidualReport end_to_end_residual(int k, const TransverseField& psi, const CollarGrid& grid, double hbar,
                                   double E_hbar, bool apply_cutoff) {
    const CollarField ansatz = build_ansatz(k, psi, grid, hbar, apply_cutoff);
    CollarField res = collar_laplacian_apply(ansatz, hbar);
    res.values -= E_hbar * ansatz.values;
    ResidualReport rep;
    rep.residual = collar_norm(res);
    rep.tangential_energy = std::pow(2.0 * std::numbers::pi * k * hbar / grid.L, 2);
    const TransverseGrid tg = grid.transverse();
    const TransverseField t = apply_cutoff ? cut_and_normalize(tg, psi, nullptr) : TransverseField(psi / weighted_norm(tg, psi));
    rep.transverse_residual =
        weighted_norm(tg, transverse_operator_apply(tg, t, hbar, rep.tangential_energy, E_hbar - rep.tangential_energy));
    return rep;
}

ResidualReport end_to_end_residual(int k, const TransverseField& psi, const CollarGrid& grid, double hbar,
                                   double E_hbar) {
    return end_to_end_residual(k, psi, grid, hbar, E_hbar, true);
}

CylinderResult run_cylinder(const CylinderConfig& cfg) {
    validate_parameter_order(cfg.epsilon1, cfg.epsilon2, cfg.degree_cap, cfg.l, cfg.hbar);
    if (!(cfg.L > 0.0)) throw ConfigError("geodesic length must be positive");
    CylinderResult out;
    out.k = mode_for(cfg.L, cfg.hbar);
    out.hbar = exact_hbar(cfg.L, out.k);
    const double h = out.hbar;
    out.E0 = std::pow(2.0 * std::numbers::pi * out.k * h / cfg.L, 2);
    const double f = cfg.f_over_hbar * h;
    const double lambda = 2.0;  // 2 sqrt(E0) with E0 = 1

    // normal form and averaged state in normal-form coordinates
    const PolySymbol ts = transverse_symbol(1.0, 1, 2 * cfg.degree_cap + 2, 1);
    const NormalFormResult nf = quantum_bnf_symbols(ts, {lambda}, cfg.degree_cap);
    const EvolutionPlan plan = make_plan(nf, cfg.l, cfg.epsilon2, h);
    const CutoffProfile chi = make_cutoff(cfg.epsilon2);
    out.T = ehrenfest_time(plan);
    const AveragedState psi = time_average(plan, chi, out.T, cfg.f_over_hbar);
    out.nf_width = std::sqrt(psi.width_sq / psi.norm_sq);

    QuasimodeReport& rep = out.report;
    rep.hbar = h;
    rep.T = out.T;
    rep.central_energy = 1.0 + f;
    rep.measured_width = out.nf_width;
    rep.cutoff_ratio = chi.ratio();
    rep.predicted_width = h / out.T * chi.ratio();
    rep.width_bound = width_constant(lambda, cfg.epsilon2) * h / std::abs(std::log(h));
    rep.norm_sq = psi.norm_sq;
    rep.S_value = s_function({lambda}, cfg.f_over_hbar, 1);
    rep.predicted_norm_sq = out.T * rep.S_value * chi.l2_norm() * chi.l2_norm();
    out.bound = 1.25 * rep.width_bound;

    // expansion in the unsqueezed basis
    const double smax = lambda * out.T * chi.support();
    int cap = static_cast<int>(40.0 / (1.0 - std::tanh(smax))) + 64;
    for (const auto& u : psi.inner) cap = std::max(cap, u.max_index(0) + 64);
    SqueezedHermiteState e = psi.expand(cap);
    while (1.0 - e.norm_sq() / psi.norm_sq > 1e-12) {
        if (cap > 200000) throw NumericalError("averaged state does not fit a Hermite expansion");
        cap = cap * 3 / 2;
        e = psi.expand(cap);
    }
    out.expansion_cap = cap;
    rep.expansion_cap = cap;
    e = scale(e, 1.0 / std::sqrt(psi.norm_sq));
    rep.mass_outside = microlocal_mass_outside(e, std::pow(h, cfg.epsilon2 / 3.0));

    // transport by the conjugator, certified against a larger basis
    const SqueezedHermiteState u1 = apply_conjugator(nf, e, cap + 64);
    const SqueezedHermiteState u2 = apply_conjugator(nf, e, cap + 128);
    {
        SqueezedHermiteState::Coeffs d;
        for (const auto& [m, v] : u2.coeffs()) d[m] += u2.phase() * v;
        for (const auto& [m, v] : u1.coeffs()) d[m] -= u1.phase() * v;
        double s = 0.0;
        for (const auto& [m, v] : d) s += std::norm(v);
        out.transport_error = std::sqrt(s);
    }

    // synthesis on the x-grid, doubling n_x until the residual settles
    int nx = cfg.n_x;
    double prev = -1.0;
    TransverseField raw;
    TransverseGrid tg;
    for (;;) {
        tg = TransverseGrid{cfg.epsilon1, nx, 1, 1};
        tg.validate();
        const std::vector<Complex> vals = evaluate_1d(u2, tg.nodes());
        raw = Eigen::Map<const TransverseField>(vals.data(), static_cast<Eigen::Index>(vals.size()));
        const TransverseField t = cut_and_normalize(tg, raw, &out.cutoff_loss);
        const double tres = weighted_norm(tg, transverse_operator_apply(tg, t, h, out.E0, 1.0 + f - out.E0));
        if (prev > 0.0 && std::abs(tres - prev) <= 0.01 * tres) break;
        if (nx >= 8192) throw NumericalError("x-grid refinement did not settle");
        prev = tres;
        nx *= 2;
    }
    out.n_x = nx;
    out.grid = tg;
    out.psi = cut_and_normalize(tg, raw, nullptr);
    out.husimi_mass = husimi_mass_in_ball(tg, out.psi, std::pow(h, cfg.epsilon2 / 3.0), h);

    CollarGrid cg{cfg.L, cfg.epsilon1, std::max(cfg.n_s, 2 * out.k + 16), nx, 1, 1};
    cg.n_s += cg.n_s % 2;
    out.n_s = cg.n_s;
    const ResidualReport rr = end_to_end_residual(out.k, raw, cg, h, 1.0 + f);
    out.residual = rr.residual;
    out.transverse_residual = rr.transverse_residual;
    return out;
}

PartialLocalization partial_localization(const CylinderResult& run, const CylinderConfig& cfg, int centers) {
    if (centers < 1) throw ConfigError("need at least one window center");
    const double h = run.hbar;
    const double f = cfg.f_over_hbar * h;
    const double C = width_constant(2.0, cfg.epsilon2);
    const double eps3 = cfg.epsilon3 > 0.0 ? cfg.epsilon3 : C / 4.0;
    const double scale = h / std::abs(std::log(h));
    const HermitianPropagator eig(transverse_operator_matrix(run.grid, h, run.E0, 1.0 + f - run.E0));
    PartialLocalization best;
    best.half_width = eps3 * scale;
    best.lower_bound = 0.9 * (eps3 / C) * 2.0 / (3.0 * std::sqrt(3.0));
    best.retained_mass = -1.0;
    for (int i = 0; i < centers; ++i) {
        const double c = centers == 1 ? 0.0 : -C * scale + 2.0 * C * scale * i / (centers - 1);
        const SpectralProjection p = spectral_project(eig, run.psi, c, best.half_width);
        if (p.retained_mass > best.retained_mass) {
            best.retained_mass = p.retained_mass;
            best.center = c;
            best.eigen_count = p.eigen_count;
        }
    }
    return best;
}

} // namespace logscar
