#pragma once

#include "logscar/grid.hpp"
#include "logscar/quasimode.hpp"

#include <vector>

namespace logscar {

// Smooth cutoff equal to 1 on [-epsilon1/3, epsilon1/3]^r and supported in [-epsilon1/2, epsilon1/2]^r.
double upsilon(const std::vector<double>& x, double epsilon1);
TransverseField upsilon_field(const TransverseGrid& g);

// Rejects parameter choices made out of order: epsilon1, then epsilon2, then N with
// (N+1) epsilon2 / 3 > 1, then l >= 2, then hbar <= hbar0(epsilon1, epsilon2).
void validate_parameter_order(double epsilon1, double epsilon2, int degree_cap, int l, double hbar);
// Heuristic threshold: the squeezed packet of size hbar^{epsilon2/2} fits in the collar.
double hbar0(double epsilon1, double epsilon2);

// Nearest circle mode with E0 = (2 pi k hbar / L)^2 ~ 1, and the hbar that makes it exact.
int mode_for(double L, double hbar);
double exact_hbar(double L, int k);

// phi(s) psi(x) with phi = e^{2 pi i k s / L} / sqrt(L) and psi multiplied by upsilon
// and normalized. Rejects k inconsistent with E0 = 1.
CollarField build_ansatz(int k, const TransverseField& psi, const CollarGrid& grid, double hbar);
// apply_cutoff = false skips upsilon (used to test exact eigenfunctions).
CollarField build_ansatz(int k, const TransverseField& psi, const CollarGrid& grid, double hbar, bool apply_cutoff);

// Anti-Wick (Husimi) mass of an r = 1 transverse field in the strip |x| <= radius:
// int |psi(y)|^2 P(|y + Z| <= radius) dy / ||psi||^2, Z ~ N(0, hbar/2).
double husimi_mass_in_ball(const TransverseGrid& g, const TransverseField& psi, double radius, double hbar);

struct ResidualReport {
    double residual = 0.0;             // ||(-hbar^2 Delta_N - E) Psi|| on the collar grid
    double transverse_residual = 0.0;  // ||K_x psi||_w
    double tangential_energy = 0.0;    // (2 pi k hbar / L)^2
};

ResidualReport end_to_end_residual(int k, const TransverseField& psi, const CollarGrid& grid, double hbar,
                                   double E_hbar);
ResidualReport end_to_end_residual(int k, const TransverseField& psi, const CollarGrid& grid, double hbar,
                                   double E_hbar, bool apply_cutoff);

struct CylinderConfig {
    double L = 1.0;
    double epsilon1 = 0.5;
    double epsilon2 = 0.45;
    double epsilon3 = -1.0;  // default: C_width / 4
    int degree_cap = 6;
    int l = 2;
    double hbar = 1.0 / 256.0;
    double f_over_hbar = 0.0;
    int n_s = 512;
    int n_x = 512;
};

struct CylinderResult {
    int k = 0;
    double hbar = 0.0;   // exact hbar for mode k
    double E0 = 0.0;
    double T = 0.0;
    double residual = 0.0;
    double transverse_residual = 0.0;
    double nf_width = 0.0;       // ||(Q - f) Psi|| / ||Psi|| in normal-form coordinates
    double bound = 0.0;          // 1.25 C_width hbar / |log hbar|
    double husimi_mass = 0.0;
    double cutoff_loss = 0.0;    // 1 - ||upsilon psi||^2 before renormalizing
    double transport_error = 0.0;
    int expansion_cap = 0;
    int n_s = 0;
    int n_x = 0;
    QuasimodeReport report;
    TransverseField psi;         // normalized, cut-off transverse quasimode on the final x-grid
    TransverseGrid grid;
};

// Normal form, time average, conjugator transport, grid synthesis, cutoff, residuals.
// The x-grid is doubled until the transverse residual changes by less than 1 %.
CylinderResult run_cylinder(const CylinderConfig& cfg);

struct PartialLocalization {
    double center = 0.0;
    double half_width = 0.0;
    double retained_mass = 0.0;
    double lower_bound = 0.0;  // 0.9 (epsilon3 / C_width) 2 / (3 sqrt 3)
    int eigen_count = 0;
};

// Projects the cylinder quasimode with the dense grid K_x onto windows of half-width
// epsilon3 hbar/|log hbar|; centers are scanned over +-C_width hbar/|log hbar| about f.
PartialLocalization partial_localization(const CylinderResult& run, const CylinderConfig& cfg, int centers = 201);

} // namespace logscar
