#pragma once

#include "logscar/birkhoff.hpp"
#include "logscar/expm.hpp"
#include "logscar/hermite.hpp"
#include "logscar/symbol.hpp"

#include <memory>
#include <vector>

namespace logscar {

// Inputs of the normal-form evolution. `resonant` lives in the normalized frame,
// so its hbar-free quadratic part is sum lambda_i y_i eta_i.
struct EvolutionPlan {
    std::vector<double> lambda;
    PolySymbol resonant{1};
    int l = 2;
    double epsilon2 = 0.3;
    double hbar = 0.01;
    int basis_cap = 0;  // 0 picks a cap automatically and certifies it
};

EvolutionPlan make_plan(const NormalFormResult& nf, int l, double epsilon2, double hbar);
// Plan for the purely quadratic model sum lambda_i y_i eta_i.
EvolutionPlan quadratic_plan(const std::vector<double>& lambda, double epsilon2, double hbar);

PolySymbol quadratic_part(const EvolutionPlan& plan);
// resonant - quadratic_part; commutes with the quadratic part.
PolySymbol nonquadratic_part(const EvolutionPlan& plan);

// (1 - epsilon2) |log hbar| / (2 lambda_max)
double ehrenfest_time(double epsilon2, double hbar, double lambda_max);
double ehrenfest_time(const EvolutionPlan& plan);

// D_{t lambda} state.
SqueezedHermiteState evolve_quadratic(const SqueezedHermiteState& state, double t, const std::vector<double>& lambda);

// exp(-i t Q / hbar) Phi0 = D_{t lambda} exp(-i t A / hbar) Phi0, A = nonquadratic part.
// The second factor is computed on a truncated basis whose cap is certified by
// comparison with a larger one over |t| <= t_max.
class FullPropagator {
public:
    FullPropagator(const EvolutionPlan& plan, double t_max);
    // exp(-i t A / hbar) Phi0 in the unsqueezed frame.
    SqueezedHermiteState inner(double t) const;
    SqueezedHermiteState at(double t) const;
    double truncation_error() const { return truncation_error_; }
    int basis_cap() const { return cap_; }
    bool trivial() const { return !prop_; }

private:
    std::vector<double> lambda_;
    double hbar_;
    int r_;
    int cap_ = 0;
    double truncation_error_ = 0.0;
    Complex constant_{};  // A restricted to Phi0 when A is a scalar
    std::shared_ptr<HermitianPropagator> prop_;
};

SqueezedHermiteState evolve_full(const EvolutionPlan& plan, double t, double* truncation_error = nullptr);

struct DysonTerm {
    int p = 0;
    Complex coefficient;            // t^p / (p! (i hbar)^p)
    SqueezedHermiteState excited;   // A^p Phi0, unsqueezed
};

struct DysonExpansion {
    double t = 0.0;
    std::vector<DysonTerm> terms;
    SqueezedHermiteState state;     // D_{t lambda} sum_p c_p A^p Phi0
    double remainder_bound = 0.0;   // size of the first omitted term
};

DysonExpansion dyson_expand(const EvolutionPlan& plan, double t);

// || evolve_full(t) - dyson_expand(t) ||
double dyson_error(const EvolutionPlan& plan, double t);

// Anti-Wick mass of the state outside the phase-space ball of the given radius
// about the origin: sum |c_n|^2 Q(|n| + r, radius^2 / (2 hbar)) / ||state||^2 on the
// unsqueezed expansion. Mass lost to the expansion cap is counted as outside.
double microlocal_mass_outside(const SqueezedHermiteState& state, double radius, int max_cap = 400000);

} // namespace logscar
