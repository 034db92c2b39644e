#pragma once

#include "logscar/hermite.hpp"
#include "logscar/quantize.hpp"
#include "logscar/symbol.hpp"

#include <Eigen/Dense>

#include <vector>

namespace logscar {

// Weyl symbol of the transverse operator
//   K = -hbar^2 (Delta + (x.d)^2 + (n-1)(x.d)) - E0 |x|^2/(1+|x|^2)
// after conjugation by w^{1/2}, w = (1+|x|^2)^{(m-1)/2}, so that it is symmetric
// on flat L^2. Taylor-expanded at the origin up to weight taylor_cap (hbar weight 1).
// The energy shift f is left to the caller.
PolySymbol transverse_symbol(double E0, int r, int taylor_cap, int m = 1);

// Linear symplectic change of variables (x, xi) = S (y, eta) bringing the
// quadratic part of a symbol to sum lambda_i y_i eta_i.
struct LinearNormalization {
    Eigen::MatrixXd S;
    std::vector<double> lambda;
    PolySymbol transformed{1};  // symbol o S
};

LinearNormalization normalize_quadratic(const PolySymbol& symbol);

struct NormalFormResult {
    std::vector<double> lambda;
    int degree_cap = 0;
    PolySymbol resonant{1};
    // One generator per nonempty level of the recursion; generator_levels holds
    // the level (weight with hbar counted twice) it was solved at.
    std::vector<PolySymbol> generators;
    std::vector<int> generator_levels;
    // Terms of hbar-weight-1 at least degree_cap + 1; exact for hbar-weight-2 levels
    // up to remainder_level_cap, higher levels dropped.
    PolySymbol remainder{1};
    int remainder_level_cap = 0;
    Eigen::MatrixXd linear_map;
    PolySymbol normalized_input{1};  // input o linear_map
    bool quantum = false;
};

// Degree-by-degree Birkhoff normal form with Poisson brackets.
NormalFormResult classical_bnf(const PolySymbol& symbol, const std::vector<double>& lambda, int degree_cap);

// Same recursion with Moyal brackets; exact symbol of the conjugated operator.
NormalFormResult quantum_bnf_symbols(const PolySymbol& symbol, const std::vector<double>& lambda, int degree_cap);

// Reverses the generator flows on resonant + remainder; returns the jet of
// (input o linear_map) up to weight `max_weight` (hbar weight 1).
PolySymbol undo_normal_form(const NormalFormResult& nf, int max_weight);

struct ConjugatorFactor {
    PolySymbol generator{1};
    HamiltonianMatrix exponent;  // quantize(generator); the factor is exp(-i exponent / hbar)
};

struct QuantumNormalForm {
    NormalFormResult symbols;
    double hbar = 0.0;
    int basis_cap = 0;
    HamiltonianMatrix nf_matrix;
    std::vector<ConjugatorFactor> conjugator;
    HamiltonianMatrix remainder_matrix;
    HamiltonianMatrix input_matrix;  // quantize(normalized input)
};

QuantumNormalForm quantum_bnf(const PolySymbol& symbol, const std::vector<double>& lambda, int degree_cap, double hbar,
                              int basis_cap);

// max_d || U_d^dagger U_d - I || on the interior block, with U_d formed densely.
double conjugator_unitarity_defect(const QuantumNormalForm& qnf);

// Per-axis factorization S = Dil(sigma) Rot(theta) of a block-diagonal linear map,
// Rot(theta) = [[cos, -sin], [sin, cos]], Dil(sigma) = diag(e^sigma, e^-sigma).
struct AxisMetaplectic {
    std::vector<double> sigma;
    std::vector<double> theta;
};
AxisMetaplectic factor_linear_map(const Eigen::MatrixXd& S);

// Metaplectic operator of Rot(theta) on an unsqueezed state: phi_m -> e^{i theta (m + 1/2)} phi_m.
SqueezedHermiteState rotate(const SqueezedHermiteState& state, const std::vector<double>& theta);

// U = M_S U_first ... U_last applied to an unsqueezed normal-form-frame state.
// Exponentials are applied by Chebyshev series on a basis of size `cap` per axis.
SqueezedHermiteState apply_conjugator(const NormalFormResult& nf, const SqueezedHermiteState& state, int cap);

} // namespace logscar
