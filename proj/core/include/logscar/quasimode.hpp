#pragma once

#include "logscar/cutoff.hpp"
#include "logscar/expm.hpp"
#include "logscar/propagation.hpp"

#include <Eigen/Dense>

#include <vector>

namespace logscar {

// Psi = sum_j weights[j] D_{t_j lambda} inner[j], the trapezoid discretization of
//   int chi(t/T) e^{i t b} exp(-i t Q / hbar) Phi0 dt
// on the uniform grid t_j = j * step. inner[j] = exp(-i t_j A / hbar) Phi0 is unsqueezed.
struct AveragedState {
    double hbar = 0.0;
    std::vector<double> lambda;
    double T = 0.0;
    double b = 0.0;  // f / hbar
    double step = 0.0;
    std::vector<double> times;
    std::vector<Complex> weights;
    std::vector<SqueezedHermiteState> inner;
    PolySymbol resonant{1};
    double norm_sq = 0.0;
    double width_sq = 0.0;  // ||(Q - f) Psi||^2
    int refinements = 0;

    std::size_t size() const { return times.size(); }
    SqueezedHermiteState node(std::size_t j) const;
    // Sum of the nodes expanded in the unsqueezed basis {0..cap-1}^r.
    SqueezedHermiteState expand(int cap) const;
};

// Trapezoid rule with step halving until the norm changes by less than 1e-8
// (relative) and the width by less than 1e-6.
AveragedState time_average(const EvolutionPlan& plan, const CutoffProfile& chi, double T, double f_over_hbar);

// Gram form sum_jk conj(y_j) <D_{s_j} u_j, D_{s_k} u_k> y_k on a uniform time grid.
double averaged_norm_sq(const AveragedState& psi, const std::vector<SqueezedHermiteState>& states);

// Width by the integration-by-parts identity
//   (Q - f) Psi = -i hbar int (chi_T)'(t) e^{itb} Phi_t dt  (up to sign),
// evaluated on the grid of psi.
double ibp_width(const AveragedState& psi, const CutoffProfile& chi);

// S(lambda, b) = int e^{-ibs} prod_i (cosh lambda_i s)^{-1/2} ds.
double s_function(const std::vector<double>& lambda, double b, int r);

// ||(Q - center) Psi|| / ||Psi|| for the averaged state.
double spectral_width(const AveragedState& psi, double center);
// ||(H - center) v|| / ||v|| for a matrix.
double spectral_width(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& v, double center);

struct SpectralProjection {
    Eigen::VectorXcd state;  // renormalized; zero when the window is empty
    double retained_mass = 0.0;
    int eigen_count = 0;
};

// Projection onto eigenvectors with eigenvalues in [center - hw, center + hw].
SpectralProjection spectral_project(const HermitianPropagator& eig, const Eigen::VectorXcd& v, double center,
                                    double half_width);
SpectralProjection spectral_project(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& v, double center,
                                    double half_width);

// pi lambda_max (1 + 3 epsilon2)
double width_constant(double lambda_max, double epsilon2);

struct QuasimodeReport {
    double hbar = 0.0;
    double T = 0.0;
    double central_energy = 0.0;
    double measured_width = 0.0;
    double predicted_width = 0.0;
    double width_bound = 0.0;  // width_constant * hbar / |log hbar|
    double norm_sq = 0.0;
    double predicted_norm_sq = 0.0;
    double mass_outside = -1.0;  // -1 when the state cannot be expanded
    double S_value = 0.0;
    double cutoff_ratio = 0.0;
    // Mass kept by projecting onto the window of half-width epsilon3 hbar/|log hbar| about E,
    // with Op(Q) truncated to the expansion basis; -1 when the expansion is unavailable.
    double window_half_width = 0.0;
    double retained_mass = -1.0;
    int expansion_cap = 0;
};

// Builds Psi for T = ehrenfest_time(plan) and E = E0 + f, f = f_over_hbar * hbar.
// epsilon3 <= 0 selects width_constant / 4; the window projection is skipped above max_projection_cap.
QuasimodeReport quasimode_report(const EvolutionPlan& plan, const CutoffProfile& chi, double E0, double f_over_hbar,
                                 double epsilon3 = -1.0, int max_projection_cap = 1600);

} // namespace logscar
