#include "logscar/error.hpp"
#include "logscar/fermi.hpp"
#include "logscar/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace logscar;

namespace {

TransverseField random_field(std::size_t n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    TransverseField u(static_cast<Eigen::Index>(n));
    for (auto& v : u) v = Complex{g(rng), g(rng)};
    return u;
}

// smooth field supported well inside the box
TransverseField bump(const TransverseGrid& g, double width) {
    TransverseField u(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
        double r2 = 0.0;
        for (double x : g.point(i)) r2 += x * x;
        u(static_cast<Eigen::Index>(i)) = std::exp(-r2 / (2 * width * width));
    }
    return u;
}

} // namespace

TEST_CASE("spectral derivative is exact on resolved modes and antisymmetric") {
    const int n = 32;
    const double L = 1.0;
    std::vector<Complex> in(n), out(n);
    for (int j = 0; j < n; ++j) in[j] = std::sin(2 * std::numbers::pi * 3 * j / n);
    spectral_derivative(in.data(), out.data(), {n}, 0, L);
    for (int j = 0; j < n; ++j) CHECK(std::abs(out[j] - 6 * std::numbers::pi * std::cos(2 * std::numbers::pi * 3 * j / n)) < 1e-11);
    // derivative along the second axis of a 2-d array
    std::vector<Complex> a(4 * n), b(4 * n);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < n; ++j) a[i * n + j] = double(i + 1) * std::cos(2 * std::numbers::pi * j / n);
    spectral_derivative(a.data(), b.data(), {4, n}, 1, L);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < n; ++j)
            CHECK(std::abs(b[i * n + j] + double(i + 1) * 2 * std::numbers::pi * std::sin(2 * std::numbers::pi * j / n)) < 1e-11);
}

TEST_CASE("transverse operator: dense matrix is Hermitian and matches the apply") {
    const TransverseGrid g{0.5, 64, 1, 1};
    const Eigen::MatrixXcd K = transverse_operator_matrix(g, 1.0 / 64, 1.0, 0.01);
    CHECK((K - K.adjoint()).norm() < 1e-12 * K.norm());
    const TransverseField u = random_field(g.size(), 1);
    CHECK((K * u - transverse_operator_apply(g, u, 1.0 / 64, 1.0, 0.01)).norm() < 1e-10 * (K * u).norm());
}

TEST_CASE("weighted kernel symmetry for m > 1 and r = 2") {
    for (const TransverseGrid g : {TransverseGrid{0.5, 32, 1, 3}, TransverseGrid{0.4, 16, 2, 2}}) {
        const TransverseField u = random_field(g.size(), 2), v = random_field(g.size(), 3);
        const Complex a = weighted_inner(g, u, transverse_operator_apply(g, v, 0.05, 1.0, 0.0));
        const Complex b = weighted_inner(g, transverse_operator_apply(g, u, 0.05, 1.0, 0.0), v);
        CHECK(std::abs(a - b) < 1e-10 * std::abs(a));
    }
}

TEST_CASE("transverse operator on a Gaussian matches the analytic formula") {
    // K psi = -h^2((1+x^2) psi'' + 2x psi') - x^2/(1+x^2) psi for m = 1
    const TransverseGrid g{0.5, 256, 1, 1};
    const double s = 0.05, h = 0.02;
    const TransverseField u = bump(g, s);
    const TransverseField k = transverse_operator_apply(g, u, h, 1.0, 0.0);
    const auto x = g.nodes();
    for (int j = 0; j < g.n_x; j += 17) {
        const double p = u(j).real(), d1 = -x[j] / (s * s) * p, d2 = (x[j] * x[j] / (s * s * s * s) - 1 / (s * s)) * p;
        const double expect = -h * h * ((1 + x[j] * x[j]) * d2 + 2 * x[j] * d1) - x[j] * x[j] / (1 + x[j] * x[j]) * p;
        CHECK(std::abs(k(j) - expect) < 1e-9);
    }
}

TEST_CASE("collar operator separates into circle mode times transverse operator") {
    const CollarGrid cg{1.0, 0.5, 64, 128, 1, 1};
    const int k = 10;
    const double h = exact_hbar(cg.L, k);
    const TransverseGrid tg = cg.transverse();
    const TransverseField psi = bump(tg, 0.05);
    const CollarField A = build_ansatz(k, psi, cg, h, false);
    CollarField R = collar_laplacian_apply(A, h);
    const double f = 0.003;
    R.values -= (1.0 + f) * A.values;
    const TransverseField t = psi / weighted_norm(tg, psi);
    const TransverseField kt = transverse_operator_apply(tg, t, h, 1.0, f);
    const auto s = cg.s_nodes();
    double worst = 0.0;
    for (int i = 0; i < cg.n_s; ++i) {
        const Complex phi = std::exp(Complex{0.0, 2 * std::numbers::pi * k * s[i] / cg.L}) / std::sqrt(cg.L);
        worst = std::max(worst, (R.values.row(i).transpose() - phi * kt).norm());
    }
    CHECK(worst < 1e-11);
    const ResidualReport rr = end_to_end_residual(k, psi, cg, h, 1.0 + f, false);
    CHECK(rr.residual == doctest::Approx(rr.transverse_residual).epsilon(1e-10));
    CHECK(rr.tangential_energy == doctest::Approx(1.0));
}

TEST_CASE("an eigenvector of the transverse matrix has tiny end-to-end residual without cutoff") {
    const CollarGrid cg{1.0, 0.5, 64, 128, 1, 1};
    const int k = 10;
    const double h = exact_hbar(cg.L, k);
    const TransverseGrid tg = cg.transverse();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(transverse_operator_matrix(tg, h, 1.0, 0.0));
    const Eigen::Index mid = tg.n_x / 2;
    const TransverseField v = es.eigenvectors().col(mid);
    const ResidualReport rr = end_to_end_residual(k, v, cg, h, 1.0 + es.eigenvalues()(mid), false);
    CHECK(rr.residual < 1e-9);
}

TEST_CASE("upsilon cutoff shape") {
    const double e1 = 0.3;
    CHECK(upsilon({0.0}, e1) == 1.0);
    CHECK(upsilon({e1 / 3}, e1) == 1.0);
    CHECK(upsilon({e1 / 2}, e1) == 0.0);
    CHECK(upsilon({-0.6 * e1}, e1) == 0.0);
    double prev = 1.0;
    for (double x = e1 / 3; x <= e1 / 2; x += 0.001) {
        const double v = upsilon({x}, e1);
        CHECK(v <= prev);
        CHECK(v >= 0.0);
        prev = v;
    }
    CHECK(upsilon({0.0, 0.45 * e1}, e1) == doctest::Approx(upsilon({0.45 * e1}, e1)));
}

TEST_CASE("parameters must be chosen in order") {
    CHECK_NOTHROW(validate_parameter_order(0.5, 0.45, 6, 2, 1.0 / 256));
    CHECK_THROWS_AS(validate_parameter_order(0.7, 0.45, 6, 2, 1.0 / 256), ConfigError);
    CHECK_THROWS_AS(validate_parameter_order(0.5, 0.5, 6, 2, 1.0 / 256), ConfigError);
    CHECK_THROWS_AS(validate_parameter_order(0.5, 0.45, 5, 2, 1.0 / 256), ConfigError);
    CHECK_THROWS_AS(validate_parameter_order(0.5, 0.45, 6, 1, 1.0 / 256), ConfigError);
    CHECK_THROWS_AS(validate_parameter_order(0.5, 0.45, 6, 2, 0.1), ConfigError);
    CHECK(hbar0(0.5, 0.45) == doctest::Approx(std::pow(0.5, 2 / 0.45)));
}

TEST_CASE("circle modes") {
    CHECK(mode_for(1.0, 1.0 / 256) == 41);
    const double h = exact_hbar(2.0, 17);
    CHECK(std::pow(2 * std::numbers::pi * 17 * h / 2.0, 2) == doctest::Approx(1.0).epsilon(1e-15));
    const CollarGrid cg{1.0, 0.5, 64, 64, 1, 1};
    CHECK_THROWS_AS(build_ansatz(10, bump(cg.transverse(), 0.05), cg, 1.0 / 128), ConfigError);
    CHECK_THROWS_AS(build_ansatz(40, bump(cg.transverse(), 0.05), cg, exact_hbar(1.0, 40)), ConfigError);
}

TEST_CASE("Husimi strip mass of a Gaussian") {
    const TransverseGrid g{0.5, 512, 1, 1};
    const double s = 0.04, h = 0.001;
    TransverseField u = bump(g, s * std::sqrt(2.0));  // |u|^2 ~ N(0, s^2)
    for (double R : {0.02, 0.05, 0.1}) {
        const double oracle = std::erf(R / std::sqrt(2 * (s * s + h / 2)));
        CHECK(husimi_mass_in_ball(g, u, R, h) == doctest::Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("cylinder run at hbar = 2^-8") {
    CylinderConfig c;
    c.hbar = 1.0 / 256;
    const CylinderResult r = run_cylinder(c);
    CHECK(r.k == 41);
    CHECK(r.transport_error < 1e-9);
    CHECK(r.residual < r.bound);
    CHECK(r.residual == doctest::Approx(r.nf_width).epsilon(0.05));
    CHECK(r.husimi_mass > 0.95);
    CHECK(weighted_norm(r.grid, r.psi) == doctest::Approx(1.0));
    const PartialLocalization p = partial_localization(r, c, 21);
    CHECK(p.retained_mass >= p.lower_bound);
    CHECK(p.retained_mass <= 1.0);
}
