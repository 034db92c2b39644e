#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace logscar {

using Complex = std::complex<double>;

// Transverse box [-epsilon1, epsilon1)^r, treated as a torus, with n_x nodes per axis.
struct TransverseGrid {
    double epsilon1 = 0.5;
    int n_x = 256;
    int r = 1;
    int m = 1;  // dimension of the submanifold; weight (1+|x|^2)^{(m-1)/2}

    int n() const { return m + r; }
    double dx() const { return 2.0 * epsilon1 / n_x; }
    std::size_t size() const;
    std::vector<double> nodes() const;  // 1-d node coordinates
    // Coordinates of flat index i (axis 0 slowest).
    std::vector<double> point(std::size_t i) const;
    void validate() const;
};

// Tensor grid (s, x) of the hyperbolic-cylinder collar: s periodic of length L.
struct CollarGrid {
    double L = 1.0;
    double epsilon1 = 0.5;
    int n_s = 512;
    int n_x = 512;
    int r = 1;
    int m = 1;

    int n() const { return m + r; }
    double ds() const { return L / n_s; }
    TransverseGrid transverse() const { return {epsilon1, n_x, r, m}; }
    std::vector<double> s_nodes() const;
    void validate() const;
};

// Values on a transverse grid, flat row-major (axis 0 slowest).
using TransverseField = Eigen::VectorXcd;

// values(i, j) at (s_i, x_j); r = 1 only.
struct CollarField {
    CollarGrid grid;
    Eigen::MatrixXcd values;
};

// Periodic spectral derivative along `axis` of a row-major array with shape dims.
// The Nyquist mode is dropped, so the derivative matrix is real antisymmetric.
void spectral_derivative(const Complex* in, Complex* out, const std::vector<int>& dims, int axis, double length);

// (1 + |x|^2)^{(m-1)/2} at every node.
Eigen::VectorXd volume_weight(const TransverseGrid& g);
double weighted_norm(const TransverseGrid& g, const TransverseField& u);
Complex weighted_inner(const TransverseGrid& g, const TransverseField& u, const TransverseField& v);

// K_x = -hbar^2 (Delta + (x.d)^2 + (n-1) x.d) - E0 |x|^2/(1+|x|^2) - f, applied in the
// divergence form -hbar^2 w^{-1} d_i (w (delta_ij + x_i x_j) d_j), which is exactly
// symmetric for the weighted discrete inner product.
TransverseField transverse_operator_apply(const TransverseGrid& g, const TransverseField& u, double hbar, double E0,
                                          double f);
// Dense matrix of K_x on an r = 1 grid (m = 1), Hermitian.
Eigen::MatrixXcd transverse_operator_matrix(const TransverseGrid& g, double hbar, double E0, double f);

// -hbar^2 Delta_N with Delta_N = (1+|x|^2)^{-1} d_s^2 + Delta_x + (x.d)^2 + (n-1) x.d.
CollarField collar_laplacian_apply(const CollarField& field, double hbar);
double collar_norm(const CollarField& field);

} // namespace logscar
