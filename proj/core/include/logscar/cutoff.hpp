#pragma once

#include <functional>

namespace logscar {

// Weight function chi on (-1, 1) with values in [0, 1].
// The built-in family is cos(pi u / 2a) on [-a, a], mollified by a C-infinity bump
// of half-width delta, with a = 1 - 1.05 delta so the support stays inside (-1, 1).
class CutoffProfile {
public:
    static CutoffProfile mollified_cosine(double delta);
    // Arbitrary profile; rejected unless it vanishes to first order at the boundary
    // and stays in [0, 1]. `support` is the half-width of its support.
    static CutoffProfile custom(std::function<double(double)> value, std::function<double(double)> derivative,
                                double support);

    double value(double u) const;
    double derivative(double u) const;

    double delta() const { return delta_; }
    double support() const { return support_; }
    double l2_norm() const { return l2_; }
    double deriv_l2_norm() const { return dl2_; }
    double ratio() const { return dl2_ / l2_; }
    double integral() const { return mass_; }

private:
    CutoffProfile() = default;
    void compute_norms();

    double delta_ = 0.0;
    double a_ = 0.0;
    double support_ = 1.0;
    double kernel_norm_ = 1.0;
    std::function<double(double)> value_;
    std::function<double(double)> derivative_;
    double l2_ = 0.0;
    double dl2_ = 0.0;
    double mass_ = 0.0;
};

// Profile from the built-in family with ratio in [pi/2, (1 + epsilon2) pi/2],
// as close to the upper end as bisection on delta allows.
CutoffProfile make_cutoff(double epsilon2);

// ||f'|| / ||f|| on [-1, 1] by composite Gauss-Legendre quadrature.
double rayleigh_ratio(const std::function<double(double)>& f, const std::function<double(double)>& df);

} // namespace logscar
