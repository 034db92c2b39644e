#include "logscar/propagation.hpp"

#include "logscar/error.hpp"
#include "logscar/quantize.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>

namespace logscar {

namespace {

void check_plan(const EvolutionPlan& plan) {
    if (plan.lambda.empty()) throw ConfigError("rate vector is empty");
    for (double l : plan.lambda)
        if (!(l > 0.0)) throw ConfigError("rates must be positive");
    if (plan.resonant.dim() != static_cast<int>(plan.lambda.size()))
        throw ConfigError("normal form and rate vector dimensions differ");
    if (plan.l < 1) throw ConfigError("Dyson order must be >= 1");
    if (!(plan.epsilon2 > 0.0 && plan.epsilon2 < 1.0)) throw ConfigError("epsilon2 must lie in (0, 1)");
    if (!(plan.hbar > 0.0 && plan.hbar <= 1.0)) throw ConfigError("hbar must lie in (0, 1]");
}

bool is_scalar(const PolySymbol& a) {
    for (const auto& [k, c] : a.terms())
        if (k.alpha.total() + k.beta.total() > 0) return false;
    return true;
}

Complex scalar_value(const PolySymbol& a, double hbar) {
    Complex s{};
    for (const auto& [k, c] : a.terms()) s += c * std::pow(hbar, k.k);
    return s;
}

Eigen::VectorXcd ground_vector(int r, int cap) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(tensor_dim(r, cap)));
    v(0) = 1.0;
    return v;
}

// Restriction of a cap-c2 vector to the indices of cap c1 < c2, and the norm left over.
Eigen::VectorXcd restrict_vector(const Eigen::VectorXcd& v, int r, int c2, int c1, double* tail) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(tensor_dim(r, c1)));
    double t = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        MultiIndex m = from_linear_index(static_cast<std::size_t>(i), r, c2);
        if (m.max_entry() < c1) out(static_cast<Eigen::Index>(linear_index(m, c1))) = v(i);
        else t += std::norm(v(i));
    }
    if (tail) *tail = std::sqrt(t);
    return out;
}

} // namespace

EvolutionPlan make_plan(const NormalFormResult& nf, int l, double epsilon2, double hbar) {
    EvolutionPlan p;
    p.lambda = nf.lambda;
    p.resonant = nf.resonant;
    p.l = l;
    p.epsilon2 = epsilon2;
    p.hbar = hbar;
    check_plan(p);
    return p;
}

EvolutionPlan quadratic_plan(const std::vector<double>& lambda, double epsilon2, double hbar) {
    const int r = static_cast<int>(lambda.size());
    EvolutionPlan p;
    p.lambda = lambda;
    p.resonant = PolySymbol(r);
    for (int i = 0; i < r; ++i) p.resonant.add_term({MultiIndex::unit(r, i), MultiIndex::unit(r, i), 0}, lambda[i]);
    p.epsilon2 = epsilon2;
    p.hbar = hbar;
    check_plan(p);
    return p;
}

PolySymbol quadratic_part(const EvolutionPlan& plan) {
    const int r = static_cast<int>(plan.lambda.size());
    PolySymbol q(r);
    for (int i = 0; i < r; ++i) q.add_term({MultiIndex::unit(r, i), MultiIndex::unit(r, i), 0}, plan.lambda[i]);
    return q;
}

PolySymbol nonquadratic_part(const EvolutionPlan& plan) {
    return (plan.resonant - quadratic_part(plan)).chopped(1e-15 * std::max(1.0, plan.resonant.max_abs_coeff()));
}

double ehrenfest_time(double epsilon2, double hbar, double lambda_max) {
    if (!(epsilon2 > 0.0 && epsilon2 <= 1.0)) throw ConfigError("epsilon2 must lie in (0, 1)");
    if (!(hbar > 0.0 && hbar <= 0.5)) throw ConfigError("hbar must lie in (0, 1/2]");
    if (!(lambda_max > 0.0)) throw ConfigError("lambda_max must be positive");
    return (1.0 - epsilon2) * std::abs(std::log(hbar)) / (2.0 * lambda_max);
}

double ehrenfest_time(const EvolutionPlan& plan) {
    return ehrenfest_time(plan.epsilon2, plan.hbar, *std::max_element(plan.lambda.begin(), plan.lambda.end()));
}

SqueezedHermiteState evolve_quadratic(const SqueezedHermiteState& state, double t, const std::vector<double>& lambda) {
    if (static_cast<int>(lambda.size()) != state.dim()) throw ConfigError("rate vector has wrong length");
    std::vector<double> logs(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) logs[i] = t * lambda[i];
    return dilate(state, logs);
}

FullPropagator::FullPropagator(const EvolutionPlan& plan, double t_max)
    : lambda_(plan.lambda), hbar_(plan.hbar), r_(static_cast<int>(plan.lambda.size())) {
    check_plan(plan);
    const PolySymbol a = nonquadratic_part(plan);
    if (is_scalar(a)) {
        constant_ = scalar_value(a, hbar_);
        cap_ = 1;
        return;
    }
    const double tm = std::abs(t_max);
    const int deg = a.max_axis_degree();
    int c1 = plan.basis_cap > 0 ? plan.basis_cap : 12 + 2 * deg;
    const std::size_t dim_limit = 4096;
    while (true) {
        const int c2 = c1 + std::max(8, c1 / 2);
        if (tensor_dim(r_, c2) > dim_limit)
            throw NumericalError("evolution basis would exceed " + std::to_string(dim_limit) + " states");
        auto p1 = std::make_shared<HermitianPropagator>(quantize(a, hbar_, c1).entries);
        auto p2 = std::make_shared<HermitianPropagator>(quantize(a, hbar_, c2).entries);
        double err = 0.0;
        for (double t : {tm, -tm, 0.5 * tm}) {
            const Eigen::VectorXcd v1 = p1->apply(t / hbar_, ground_vector(r_, c1));
            const Eigen::VectorXcd v2 = p2->apply(t / hbar_, ground_vector(r_, c2));
            double tail = 0.0;
            const Eigen::VectorXcd v2r = restrict_vector(v2, r_, c2, c1, &tail);
            err = std::max(err, std::hypot((v1 - v2r).norm(), tail));
        }
        if (err <= 1e-11 || plan.basis_cap > 0) {
            if (err > 1e-8) throw NumericalError("evolution basis cap too small (truncation error " + std::to_string(err) + ")");
            cap_ = c2;
            truncation_error_ = err;
            prop_ = p2;
            return;
        }
        c1 = c2;
    }
}

SqueezedHermiteState FullPropagator::inner(double t) const {
    const std::vector<double> zero(static_cast<std::size_t>(r_), 0.0);
    if (!prop_) {
        SqueezedHermiteState g = ground_state(hbar_, r_);
        return scale(g, std::exp(Complex{0.0, -t / hbar_} * constant_));
    }
    return from_vector(hbar_, zero, prop_->apply(t / hbar_, ground_vector(r_, cap_)), cap_);
}

SqueezedHermiteState FullPropagator::at(double t) const { return evolve_quadratic(inner(t), t, lambda_); }

SqueezedHermiteState evolve_full(const EvolutionPlan& plan, double t, double* truncation_error) {
    if (std::abs(t) > 1.5 * ehrenfest_time(plan) + 1e-12)
        throw ConfigError("evolution time beyond 1.5 Ehrenfest times");
    FullPropagator prop(plan, t);
    if (truncation_error) *truncation_error = prop.truncation_error();
    return prop.at(t);
}

DysonExpansion dyson_expand(const EvolutionPlan& plan, double t) {
    check_plan(plan);
    const int r = static_cast<int>(plan.lambda.size());
    const PolySymbol a = nonquadratic_part(plan);
    DysonExpansion out{t, {}, ground_state(plan.hbar, r), 0.0};
    SqueezedHermiteState power = ground_state(plan.hbar, r);
    SqueezedHermiteState sum = ground_state(plan.hbar, r);
    Complex c{1.0, 0.0};
    const Complex step{0.0, -t / plan.hbar};
    out.terms.push_back({0, c, power});
    for (int p = 1; p <= plan.l + 1; ++p) {
        power = apply_weyl(a, power);
        c *= step / static_cast<double>(p);
        if (p == plan.l + 1) {
            out.remainder_bound = std::abs(c) * power.norm();
            break;
        }
        out.terms.push_back({p, c, power});
        if (!power.empty()) sum = add(sum, scale(power, c));
    }
    out.state = evolve_quadratic(sum, t, plan.lambda);
    return out;
}

double dyson_error(const EvolutionPlan& plan, double t) {
    FullPropagator prop(plan, t);
    const SqueezedHermiteState full = prop.inner(t);
    DysonExpansion d = dyson_expand(plan, t);
    // both share the squeeze t lambda, so compare in the unsqueezed frame
    SqueezedHermiteState::Coeffs acc;
    for (const auto& term : d.terms)
        for (const auto& [m, v] : term.excited.coeffs()) acc[m] += term.coefficient * term.excited.phase() * v;
    for (const auto& [m, v] : full.coeffs()) acc[m] -= full.phase() * v;
    double s = 0.0;
    for (const auto& [m, v] : acc) s += std::norm(v);
    return std::sqrt(s);
}

double microlocal_mass_outside(const SqueezedHermiteState& state, double radius, int max_cap) {
    if (!(radius > 0.0)) throw ConfigError("radius must be positive");
    const double total = state.norm_sq();
    if (total == 0.0) throw NumericalError("mass of the zero state is undefined");
    int cap = 0;
    const SqueezedHermiteState u = unsqueeze_to_tolerance(state, 1e-12, max_cap, &cap);
    const double z = radius * radius / (2.0 * state.hbar());
    const int r = state.dim();
    double inside_norm = 0.0, outside = 0.0;
    for (const auto& [m, v] : u.coeffs()) {
        const double w = std::norm(u.phase() * v);
        inside_norm += w;
        outside += w * boost::math::gamma_q(static_cast<double>(m.total() + r), z);
    }
    outside += std::max(0.0, total - inside_norm);
    return std::clamp(outside / total, 0.0, 1.0);
}

} // namespace logscar
