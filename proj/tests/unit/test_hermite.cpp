#include "logscar/hermite.hpp"
#include "logscar/quantize.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <random>

using namespace logscar;
using boost::math::quadrature::gauss_kronrod;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
    return gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
}

SqueezedHermiteState random_state(std::mt19937_64& rng, double hbar, int n) {
    std::normal_distribution<double> g;
    SqueezedHermiteState::Coeffs c;
    for (int i = 0; i < n; ++i) c[MultiIndex{i}] = Complex{g(rng), g(rng)};
    return {hbar, {0.0}, c};
}

} // namespace

TEST_CASE("hermite functions are orthonormal under quadrature") {
    const double h = 0.05;
    for (int m : {0, 3, 7})
        for (int n : {0, 3, 8}) {
            const double v = integrate([&](double x) { auto f = hermite_functions(x, h, 8); return f[m] * f[n]; }, -3, 3);
            CHECK(v == doctest::Approx(m == n ? 1.0 : 0.0).epsilon(1e-10));
        }
}

TEST_CASE("hermite functions stay finite far out and at high order") {
    const auto f = hermite_functions(30.0, 1.0, 2000);
    for (double v : f) CHECK(std::isfinite(v));
    const auto g = hermite_functions(0.0, 1.0, 2000);
    CHECK(std::abs(g[2000]) < 1.0);
}

TEST_CASE("squeeze overlaps agree with direct quadrature") {
    const double h = 0.1;
    for (double s : {-0.7, 0.3, 1.1}) {
        const Eigen::MatrixXd M = squeeze_overlaps(s, 6, 6);
        for (int m = 0; m < 6; ++m)
            for (int n = 0; n < 6; ++n) {
                const double q = integrate(
                    [&](double x) {
                        return hermite_functions(x, h, 6)[m] * std::exp(-s / 2) * hermite_functions(std::exp(-s) * x, h, 6)[n];
                    },
                    -8, 8);
                CHECK(M(m, n) == doctest::Approx(q).epsilon(1e-9).scale(1.0));
            }
    }
}

TEST_CASE("ground overlap closed form") {
    const auto g = ground_state(0.01, 1);
    for (double s : {-3.0, -0.5, 0.0, 0.25, 2.0, 6.0}) {
        CHECK(std::abs(inner_product(g, dilate(g, {s})) - 1.0 / std::sqrt(std::cosh(s))) < 1e-13);
        CHECK(squeeze_overlaps(s, 1, 1)(0, 0) == doctest::Approx(1.0 / std::sqrt(std::cosh(s))));
    }
}

TEST_CASE("tensor overlap factorizes over axes") {
    const auto g = ground_state(0.02, 2);
    const Complex v = inner_product(g, dilate(g, {0.4, -1.2}));
    CHECK(std::abs(v - 1.0 / std::sqrt(std::cosh(0.4) * std::cosh(1.2))) < 1e-13);
}

TEST_CASE("ladder operators are mutually adjoint") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const auto u = random_state(rng, 0.1, 12), v = random_state(rng, 0.1, 12);
        CHECK(std::abs(inner_product(raise(u, 0), v) - inner_product(u, lower(v, 0))) < 1e-12);
    }
}

TEST_CASE("number operator has integer eigenvalues") {
    const auto b = basis_state(0.3, MultiIndex{5});
    const auto n = raise(lower(b, 0), 0);
    CHECK(n.amplitude(MultiIndex{5}).real() == doctest::Approx(5.0));
}

TEST_CASE("Op(x) matches multiplication by x") {
    const double h = 0.2;
    const auto b = basis_state(h, MultiIndex{2});
    const auto xb = apply_weyl(PolySymbol::x(1, 0), b);
    for (double x : {-0.7, 0.1, 0.9}) {
        const Complex lhs = evaluate_1d(xb, {x})[0];
        CHECK(std::abs(lhs - x * evaluate_1d(b, {x})[0]) < 1e-12);
    }
}

TEST_CASE("dilation acts on point values") {
    std::mt19937_64 rng(3);
    const auto u = random_state(rng, 0.05, 6);
    const double s = 0.8;
    const auto d = dilate(u, {s});
    for (double x : {-0.4, 0.05, 0.6})
        CHECK(std::abs(evaluate_1d(d, {x})[0] - std::exp(-s / 2) * evaluate_1d(u, {std::exp(-s) * x})[0]) < 1e-12);
}

TEST_CASE("unsqueeze preserves values and norm") {
    std::mt19937_64 rng(11);
    const auto u = dilate(random_state(rng, 0.05, 4), {0.9});
    double lost = 1.0;
    const auto e = unsqueeze(u, 400, &lost);
    CHECK(lost < 1e-12);
    CHECK(e.norm() == doctest::Approx(u.norm()).epsilon(1e-12));
    for (double x : {-0.3, 0.0, 0.2}) CHECK(std::abs(evaluate_1d(e, {x})[0] - evaluate_1d(u, {x})[0]) < 1e-10);
}

TEST_CASE("to_vector and from_vector round trip") {
    std::mt19937_64 rng(5);
    const auto u = random_state(rng, 0.1, 9);
    const auto v = from_vector(0.1, {0.0}, to_vector(u, 9), 9);
    CHECK(std::abs(inner_product(u, v) - u.norm_sq()) < 1e-12);
}

TEST_CASE("adding states with different frames is rejected") {
    const auto g = ground_state(0.1, 1);
    CHECK_THROWS(add(g, dilate(g, {0.1})));
    CHECK_THROWS(raise(dilate(g, {0.1}), 0));
}

TEST_CASE("log_cosh does not overflow") {
    CHECK(log_cosh(1000.0) == doctest::Approx(1000.0 - std::log(2.0)));
    CHECK(log_cosh(0.5) == doctest::Approx(std::log(std::cosh(0.5))));
}
