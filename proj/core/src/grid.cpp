#include "logscar/grid.hpp"

#include "logscar/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace logscar {

namespace {

// FFTW planning is not thread safe.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

std::size_t product(const std::vector<int>& d, std::size_t from, std::size_t to) {
    std::size_t p = 1;
    for (std::size_t i = from; i < to; ++i) p *= static_cast<std::size_t>(d[i]);
    return p;
}

} // namespace

std::size_t TransverseGrid::size() const {
    std::size_t s = 1;
    for (int i = 0; i < r; ++i) s *= static_cast<std::size_t>(n_x);
    return s;
}

std::vector<double> TransverseGrid::nodes() const {
    std::vector<double> x(static_cast<std::size_t>(n_x));
    for (int j = 0; j < n_x; ++j) x[j] = -epsilon1 + j * dx();
    return x;
}

std::vector<double> TransverseGrid::point(std::size_t i) const {
    std::vector<double> p(static_cast<std::size_t>(r));
    for (int a = r - 1; a >= 0; --a) {
        p[a] = -epsilon1 + static_cast<double>(i % static_cast<std::size_t>(n_x)) * dx();
        i /= static_cast<std::size_t>(n_x);
    }
    return p;
}

void TransverseGrid::validate() const {
    if (n_x < 16) throw ConfigError("n_x must be >= 16");
    if (n_x % 2) throw ConfigError("n_x must be even");
    if (!(epsilon1 > 0.0 && epsilon1 <= 0.5)) throw ConfigError("epsilon1 must lie in (0, 0.5]");
    if (r < 1 || m < 1) throw ConfigError("dimensions must be >= 1");
}

std::vector<double> CollarGrid::s_nodes() const {
    std::vector<double> s(static_cast<std::size_t>(n_s));
    for (int j = 0; j < n_s; ++j) s[j] = j * ds();
    return s;
}

void CollarGrid::validate() const {
    transverse().validate();
    if (n_s < 16 || n_s % 2) throw ConfigError("n_s must be even and >= 16");
    if (!(L > 0.0)) throw ConfigError("geodesic length must be positive");
    if (r != 1 || m != 1) throw ConfigError("the collar grid models the cylinder case r = 1, m = 1");
}

void spectral_derivative(const Complex* in, Complex* out, const std::vector<int>& dims, int axis, double length) {
    const int n = dims[static_cast<std::size_t>(axis)];
    const std::size_t inner = product(dims, static_cast<std::size_t>(axis) + 1, dims.size());
    const std::size_t outer = product(dims, 0, static_cast<std::size_t>(axis));
    const std::size_t block = inner * static_cast<std::size_t>(n);
    std::vector<Complex> buf(block);
    auto* b = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        const int nn[1] = {n};
        const int stride = static_cast<int>(inner);
        fwd = fftw_plan_many_dft(1, nn, stride, b, nullptr, stride, 1, b, nullptr, stride, 1, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
        bwd = fftw_plan_many_dft(1, nn, stride, b, nullptr, stride, 1, b, nullptr, stride, 1, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    }
    const double k0 = 2.0 * std::numbers::pi / length;
    for (std::size_t o = 0; o < outer; ++o) {
        std::copy(in + o * block, in + (o + 1) * block, buf.begin());
        fftw_execute_dft(fwd, b, b);
        for (int j = 0; j < n; ++j) {
            const int kj = (j < n / 2) ? j : (j == n / 2 ? 0 : j - n);
            const Complex factor{0.0, k0 * kj / n};
            for (std::size_t i = 0; i < inner; ++i) buf[static_cast<std::size_t>(j) * inner + i] *= factor;
        }
        fftw_execute_dft(bwd, b, b);
        std::copy(buf.begin(), buf.end(), out + o * block);
    }
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
}

Eigen::VectorXd volume_weight(const TransverseGrid& g) {
    Eigen::VectorXd w(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        double rho = 0.0;
        for (double x : g.point(i)) rho += x * x;
        w(static_cast<Eigen::Index>(i)) = std::pow(1.0 + rho, 0.5 * (g.m - 1));
    }
    return w;
}

Complex weighted_inner(const TransverseGrid& g, const TransverseField& u, const TransverseField& v) {
    if (static_cast<std::size_t>(u.size()) != g.size() || u.size() != v.size())
        throw ConfigError("field size does not match the grid");
    const Eigen::VectorXd w = volume_weight(g);
    return (u.conjugate().cwiseProduct(w.cast<Complex>()).cwiseProduct(v)).sum() * std::pow(g.dx(), g.r);
}

double weighted_norm(const TransverseGrid& g, const TransverseField& u) {
    return std::sqrt(std::max(0.0, weighted_inner(g, u, u).real()));
}

TransverseField transverse_operator_apply(const TransverseGrid& g, const TransverseField& u, double hbar, double E0,
                                          double f) {
    g.validate();
    if (static_cast<std::size_t>(u.size()) != g.size()) throw ConfigError("field size does not match the grid");
    const std::vector<int> dims(static_cast<std::size_t>(g.r), g.n_x);
    const double len = 2.0 * g.epsilon1;
    const Eigen::VectorXd w = volume_weight(g);
    const auto N = static_cast<Eigen::Index>(g.size());
    std::vector<TransverseField> grad(static_cast<std::size_t>(g.r), TransverseField(N));
    for (int a = 0; a < g.r; ++a) spectral_derivative(u.data(), grad[a].data(), dims, a, len);
    std::vector<std::vector<double>> pts(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) pts[i] = g.point(i);
    TransverseField div = TransverseField::Zero(N);
    TransverseField flux(N), tmp(N);
    for (int a = 0; a < g.r; ++a) {
        for (Eigen::Index i = 0; i < N; ++i) {
            const auto& x = pts[static_cast<std::size_t>(i)];
            Complex xg{};
            for (int b = 0; b < g.r; ++b) xg += x[b] * grad[b](i);
            flux(i) = w(i) * (grad[a](i) + x[a] * xg);
        }
        spectral_derivative(flux.data(), tmp.data(), dims, a, len);
        div += tmp;
    }
    TransverseField out(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        double rho = 0.0;
        for (double x : pts[static_cast<std::size_t>(i)]) rho += x * x;
        out(i) = -hbar * hbar * div(i) / w(i) - (E0 * rho / (1.0 + rho) + f) * u(i);
    }
    return out;
}

Eigen::MatrixXcd transverse_operator_matrix(const TransverseGrid& g, double hbar, double E0, double f) {
    g.validate();
    if (g.r != 1 || g.m != 1) throw ConfigError("dense transverse matrix is built for r = 1, m = 1");
    const int n = g.n_x;
    Eigen::MatrixXcd D(n, n);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n), col(n);
    const std::vector<int> dims{n};
    for (int j = 0; j < n; ++j) {
        e.setZero();
        e(j) = 1.0;
        spectral_derivative(e.data(), col.data(), dims, 0, 2.0 * g.epsilon1);
        D.col(j) = col;
    }
    D = D.real().cast<Complex>();
    const std::vector<double> x = g.nodes();
    Eigen::VectorXd a(n), v(n);
    for (int j = 0; j < n; ++j) {
        a(j) = 1.0 + x[j] * x[j];
        v(j) = E0 * x[j] * x[j] / (1.0 + x[j] * x[j]) + f;
    }
    Eigen::MatrixXcd H = -hbar * hbar * D * a.cast<Complex>().asDiagonal() * D;
    H.diagonal() -= v.cast<Complex>();
    return 0.5 * (H + H.adjoint());
}

CollarField collar_laplacian_apply(const CollarField& field, double hbar) {
    const CollarGrid& g = field.grid;
    g.validate();
    if (field.values.rows() != g.n_s || field.values.cols() != g.n_x) throw ConfigError("field shape does not match grid");
    // row-major copy: index (i, j) -> i * n_x + j
    std::vector<Complex> data(static_cast<std::size_t>(g.n_s) * g.n_x);
    for (int i = 0; i < g.n_s; ++i)
        for (int j = 0; j < g.n_x; ++j) data[static_cast<std::size_t>(i) * g.n_x + j] = field.values(i, j);
    const std::vector<int> dims{g.n_s, g.n_x};
    std::vector<Complex> ds1(data.size()), ds2(data.size()), dx1(data.size()), dx2(data.size());
    spectral_derivative(data.data(), ds1.data(), dims, 0, g.L);
    spectral_derivative(ds1.data(), ds2.data(), dims, 0, g.L);
    spectral_derivative(data.data(), dx1.data(), dims, 1, 2.0 * g.epsilon1);
    const std::vector<double> x = g.transverse().nodes();
    for (int i = 0; i < g.n_s; ++i)
        for (int j = 0; j < g.n_x; ++j) dx1[static_cast<std::size_t>(i) * g.n_x + j] *= 1.0 + x[j] * x[j];
    spectral_derivative(dx1.data(), dx2.data(), dims, 1, 2.0 * g.epsilon1);
    CollarField out{g, Eigen::MatrixXcd(g.n_s, g.n_x)};
    for (int i = 0; i < g.n_s; ++i)
        for (int j = 0; j < g.n_x; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * g.n_x + j;
            out.values(i, j) = -hbar * hbar * (ds2[k] / (1.0 + x[j] * x[j]) + dx2[k]);
        }
    return out;
}

double collar_norm(const CollarField& field) {
    return std::sqrt(field.values.squaredNorm() * field.grid.ds() * field.grid.transverse().dx());
}

} // namespace logscar
