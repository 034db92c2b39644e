#pragma once

#include "logscar/multi_index.hpp"

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <vector>

namespace logscar {

using Complex = std::complex<double>;

// phase * D_squeeze sum_m coeffs[m] phi_m, where phi_m are the L^2-normalized
// Hermite functions of width sqrt(hbar) and D_s u(x) = e^{-sum s/2} u(e^{-s} x).
class SqueezedHermiteState {
public:
    using Coeffs = std::map<MultiIndex, Complex>;

    SqueezedHermiteState(double hbar, std::vector<double> squeeze, Coeffs coeffs, Complex phase = {1.0, 0.0});

    double hbar() const { return hbar_; }
    int dim() const { return static_cast<int>(squeeze_.size()); }
    const std::vector<double>& squeeze() const { return squeeze_; }
    const Coeffs& coeffs() const { return coeffs_; }
    Complex phase() const { return phase_; }

    // phase * coefficient at m (zero when m is not stored).
    Complex amplitude(const MultiIndex& m) const;
    double norm() const;
    double norm_sq() const;
    SqueezedHermiteState normalized() const;
    bool has_zero_squeeze() const;
    int max_index(int axis) const;
    bool empty() const { return coeffs_.empty(); }

private:
    double hbar_;
    std::vector<double> squeeze_;
    Coeffs coeffs_;
    Complex phase_;
};

SqueezedHermiteState ground_state(double hbar, int r);
SqueezedHermiteState basis_state(double hbar, const MultiIndex& m);

// Ladder operators a*_axis, a_axis. Only defined on unsqueezed states.
SqueezedHermiteState raise(const SqueezedHermiteState& state, int axis);
SqueezedHermiteState lower(const SqueezedHermiteState& state, int axis);

SqueezedHermiteState dilate(const SqueezedHermiteState& state, const std::vector<double>& logs);
SqueezedHermiteState scale(const SqueezedHermiteState& state, Complex factor);
// a + b; both must share hbar and squeeze.
SqueezedHermiteState add(const SqueezedHermiteState& a, const SqueezedHermiteState& b);

Complex inner_product(const SqueezedHermiteState& a, const SqueezedHermiteState& b);

std::vector<Complex> evaluate(const SqueezedHermiteState& state, const std::vector<std::vector<double>>& points);
std::vector<Complex> evaluate_1d(const SqueezedHermiteState& state, const std::vector<double>& xs);

// phi_0(x) ... phi_nmax(x) for width sqrt(hbar); stable for large nmax and |x|.
std::vector<double> hermite_functions(double x, double hbar, int nmax);

// M(s)_{mn} = <phi_m, D_s phi_n> for 0 <= m < rows, 0 <= n < cols (1-d, real).
Eigen::MatrixXd squeeze_overlaps(double s, int rows, int cols);

// log cosh(s) without overflow.
double log_cosh(double s);

// Expansion of the state in the unsqueezed basis {0..cap-1}^r. The squared
// norm that falls outside the cap is written to *discarded when given.
SqueezedHermiteState unsqueeze(const SqueezedHermiteState& state, int cap, double* discarded = nullptr);
// Grows the cap until the discarded squared norm is below tol * norm^2.
SqueezedHermiteState unsqueeze_to_tolerance(const SqueezedHermiteState& state, double tol, int max_cap,
                                            int* cap_used = nullptr);

// Dense coefficient vector (phase folded in) in the state's own frame.
Eigen::VectorXcd to_vector(const SqueezedHermiteState& state, int cap);
SqueezedHermiteState from_vector(double hbar, const std::vector<double>& squeeze, const Eigen::VectorXcd& v, int cap);

} // namespace logscar
