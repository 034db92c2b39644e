#pragma once

#include "logscar/quantize.hpp"

#include <Eigen/Dense>

namespace logscar {

// exp(-i tau H) for Hermitian H via eigendecomposition.
Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& H, double tau);

// Eigendecomposition kept for repeated exp(-i t H) v at many t.
class HermitianPropagator {
public:
    explicit HermitianPropagator(const Eigen::MatrixXcd& H);
    Eigen::VectorXcd apply(double tau, const Eigen::VectorXcd& v) const;
    const Eigen::VectorXd& eigenvalues() const { return evals_; }
    const Eigen::MatrixXcd& eigenvectors() const { return evecs_; }

private:
    Eigen::VectorXd evals_;
    Eigen::MatrixXcd evecs_;
};

// exp(-i tau H) v for sparse Hermitian H by a Chebyshev expansion on Gershgorin
// bounds of the spectrum. `terms_used` reports the expansion length.
Eigen::VectorXcd expm_apply_chebyshev(const SparseMatrixC& H, double tau, const Eigen::VectorXcd& v,
                                      double tol = 1e-14, int* terms_used = nullptr);

} // namespace logscar
