#include "logscar/expm.hpp"

#include "logscar/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace logscar {

Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& H, double tau) {
    HermitianPropagator p(H);
    const Eigen::VectorXcd phases = (Complex{0.0, -tau} * p.eigenvalues().cast<Complex>()).array().exp();
    return p.eigenvectors() * phases.asDiagonal() * p.eigenvectors().adjoint();
}

HermitianPropagator::HermitianPropagator(const Eigen::MatrixXcd& H) {
    const Eigen::MatrixXcd sym = 0.5 * (H + H.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
    if (es.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver failed");
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
}

Eigen::VectorXcd HermitianPropagator::apply(double tau, const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd c = evecs_.adjoint() * v;
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(Complex{0.0, -tau * evals_(i)});
    return evecs_ * c;
}

namespace {

// J_0(z) ... J_n(z) for z >= 0 by Miller's backward recurrence, normalized with
// J_0 + 2 sum J_{2k} = 1. Trailing terms below tol are cut.
std::vector<double> bessel_j_sequence(double z, double tol) {
    const int start = static_cast<int>(z + 40.0 + 12.0 * std::cbrt(z + 1.0)) + 10;
    std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
    double next = 0.0, cur = 1e-300;
    for (int k = start; k >= 0; --k) {
        j[static_cast<std::size_t>(k)] = cur;
        const double prev = (k == 0) ? 0.0 : 2.0 * k / z * cur - next;
        next = cur;
        cur = prev;
        if (std::abs(cur) > 1e250) {
            for (int i = k; i <= start; ++i) j[static_cast<std::size_t>(i)] *= 1e-250;
            cur *= 1e-250;
            next *= 1e-250;
        }
    }
    double norm = j[0];
    for (int k = 2; k <= start; k += 2) norm += 2.0 * j[static_cast<std::size_t>(k)];
    for (double& v : j) v /= norm;
    int last = start;
    while (last > 0 && last > z && std::abs(j[static_cast<std::size_t>(last)]) < tol) --last;
    j.resize(static_cast<std::size_t>(last) + 1);
    return j;
}

} // namespace

Eigen::VectorXcd expm_apply_chebyshev(const SparseMatrixC& H, double tau, const Eigen::VectorXcd& v, double tol,
                                      int* terms_used) {
    if (H.rows() != H.cols() || H.rows() != v.size()) throw ConfigError("Chebyshev: dimension mismatch");
    Eigen::VectorXd radius = Eigen::VectorXd::Zero(H.rows());
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(H.rows());
    for (Eigen::Index k = 0; k < H.outerSize(); ++k)
        for (SparseMatrixC::InnerIterator it(H, k); it; ++it) {
            if (it.row() == it.col()) diag(it.row()) += it.value().real();
            else radius(it.row()) += std::abs(it.value());
        }
    const double lo = (diag - radius).minCoeff();
    const double hi = (diag + radius).maxCoeff();
    const double center = 0.5 * (hi + lo);
    const double half = std::max(0.5 * (hi - lo), 1e-300);
    const double z = std::abs(tau) * half;
    if (z < 1e-300) {
        if (terms_used) *terms_used = 0;
        return std::exp(Complex{0.0, -tau * center}) * v;
    }
    // exp(-i tau H) = e^{-i tau c} sum_k (2 - delta_k0) (-i sgn tau)^k J_k(|tau| h) T_k((H - c)/h)
    const std::vector<double> jk = bessel_j_sequence(z, tol * 1e-2);
    auto apply_normalized = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return (H * x - center * x) / half; };
    const Complex step{0.0, tau >= 0 ? -1.0 : 1.0};
    Eigen::VectorXcd t0 = v;
    Eigen::VectorXcd acc = jk[0] * t0;
    if (jk.size() > 1) {
        Eigen::VectorXcd t1 = apply_normalized(v);
        Complex ipow = step;
        acc += 2.0 * ipow * jk[1] * t1;
        for (std::size_t k = 2; k < jk.size(); ++k) {
            Eigen::VectorXcd t2 = 2.0 * apply_normalized(t1) - t0;
            ipow *= step;
            acc += 2.0 * ipow * jk[k] * t2;
            t0.swap(t1);
            t1.swap(t2);
        }
    }
    if (terms_used) *terms_used = static_cast<int>(jk.size());
    return std::exp(Complex{0.0, -tau * center}) * acc;
}

} // namespace logscar
