#include "logscar/cutoff.hpp"
#include "logscar/error.hpp"
#include "logscar/quasimode.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/trapezoidal.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace logscar;
using boost::math::quadrature::gauss_kronrod;

TEST_CASE("S function against the Beta function and closed forms") {
    const double B = std::beta(0.25, 0.5);
    for (double l : {1.0, 2.0, 4.0}) CHECK(s_function({l}, 0.0, 1) == doctest::Approx(B / l).epsilon(1e-12));
    CHECK(s_function({2.0}, 0.0, 1) == doctest::Approx(2.62205755429).epsilon(1e-10));
    // (cosh 2s)^{-1} integrates to pi/2
    CHECK(s_function({2.0, 2.0}, 0.0, 2) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
    CHECK_THROWS_AS(s_function({2.0, 1.0, 1.0}, 0.0, 2), ConfigError);
}

TEST_CASE("S function with an oscillating factor matches trapezoid quadrature") {
    for (double b : {0.5, 3.0}) {
        auto f = [&](double s) { return std::cos(b * s) / std::sqrt(std::cosh(2.0 * s)); };
        const double oracle = boost::math::quadrature::trapezoidal(f, -40.0, 40.0, 1e-13);
        CHECK(s_function({2.0}, b, 1) == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("cutoff profile properties") {
    for (double e2 : {0.1, 0.3, 0.45}) {
        const CutoffProfile chi = make_cutoff(e2);
        CHECK(chi.support() < 1.0);
        CHECK(chi.ratio() >= std::numbers::pi / 2);
        CHECK(chi.ratio() <= (1 + e2) * std::numbers::pi / 2 + 1e-12);
        for (double u = -1.0; u <= 1.0; u += 0.01) {
            CHECK(chi.value(u) >= 0.0);
            CHECK(chi.value(u) <= 1.0 + 1e-14);
        }
        CHECK(chi.value(chi.support()) == doctest::Approx(0.0));
        for (double u : {-0.6, -0.1, 0.3, 0.8}) {
            const double fd = (chi.value(u + 1e-6) - chi.value(u - 1e-6)) / 2e-6;
            CHECK(chi.derivative(u) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        }
        const double l2 = std::sqrt(gauss_kronrod<double, 61>::integrate(
            [&](double u) { return chi.value(u) * chi.value(u); }, -1.0, 1.0, 15, 1e-13));
        CHECK(chi.l2_norm() == doctest::Approx(l2).epsilon(1e-8));
    }
    CHECK_THROWS_AS(make_cutoff(0.5), ConfigError);
    CHECK_THROWS_AS(make_cutoff(0.0), ConfigError);
}

TEST_CASE("Rayleigh ratio of the cosine is pi/2; bad custom profiles are rejected") {
    const double pi = std::numbers::pi;
    CHECK(rayleigh_ratio([&](double u) { return std::cos(pi * u / 2); }, [&](double u) { return -pi / 2 * std::sin(pi * u / 2); }) ==
          doctest::Approx(pi / 2).epsilon(1e-12));
    const double a = 0.9;
    auto c = [&](double u) { return std::abs(u) < a ? std::cos(pi * u / (2 * a)) : 0.0; };
    auto dc = [&](double u) { return std::abs(u) < a ? -pi / (2 * a) * std::sin(pi * u / (2 * a)) : 0.0; };
    CHECK_THROWS_AS(CutoffProfile::custom([](double) { return 1.0; }, [](double) { return 0.0; }, a), ConfigError);
    CHECK_THROWS_AS(CutoffProfile::custom([&](double u) { return 2.0 * c(u); }, [&](double u) { return 2.0 * dc(u); }, a),
                    ConfigError);
    CHECK_THROWS_AS(CutoffProfile::custom(c, dc, 1.0), ConfigError);
    const CutoffProfile ok = CutoffProfile::custom(c, dc, a);
    CHECK(ok.ratio() == doctest::Approx(pi / (2 * a)).epsilon(1e-8));
}

TEST_CASE("averaged norm agrees with 2-d quadrature of the overlap kernel") {
    const double h = 1.0 / 1024, T = 5.0, lam = 2.0;
    const CutoffProfile chi = make_cutoff(0.3);
    const AveragedState psi = time_average(quadratic_plan({lam}, 0.3, h), chi, T, 0.0);
    const double a = T * chi.support();
    auto inner = [&](double t) {
        return gauss_kronrod<double, 61>::integrate(
            [&](double s) { return chi.value(t / T) * chi.value(s / T) / std::sqrt(std::cosh(lam * (t - s))); }, -a, a, 8, 1e-11);
    };
    const double oracle = gauss_kronrod<double, 61>::integrate(inner, -a, a, 8, 1e-10);
    CHECK(psi.norm_sq == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("integration by parts width agrees with the Gram width") {
    const CutoffProfile chi = make_cutoff(0.3);
    for (double T : {3.0, 10.0}) {
        const AveragedState psi = time_average(quadratic_plan({2.0}, 0.3, 1.0 / 4096), chi, T, 0.0);
        const double w = std::sqrt(psi.width_sq / psi.norm_sq);
        CHECK(ibp_width(psi, chi) == doctest::Approx(w).epsilon(1e-5));
        CHECK(spectral_width(psi, 0.0) == doctest::Approx(w).epsilon(1e-12));
    }
}

TEST_CASE("expansion of the averaged state keeps its norm") {
    const CutoffProfile chi = make_cutoff(0.3);
    const AveragedState psi = time_average(quadratic_plan({2.0}, 0.3, 1.0 / 256), chi, 1.0, 0.0);
    const auto e = psi.expand(400);
    CHECK(e.norm_sq() == doctest::Approx(psi.norm_sq).epsilon(1e-9));
}

TEST_CASE("spectral projection and matrix width") {
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(4, 4);
    H.diagonal() << -1.0, 0.0, 0.1, 2.0;
    Eigen::VectorXcd v(4);
    v << 1.0, 1.0, 1.0, 1.0;
    const SpectralProjection p = spectral_project(H, v, 0.05, 0.06);
    CHECK(p.eigen_count == 2);
    CHECK(p.retained_mass == doctest::Approx(0.5));
    CHECK(p.state.norm() == doctest::Approx(1.0));
    CHECK(spectral_width(H, v, 0.0) == doctest::Approx(std::sqrt((1 + 0.01 + 4) / 4.0)));
    CHECK(width_constant(2.0, 0.3) == doctest::Approx(std::numbers::pi * 2 * 1.9));
}

TEST_CASE("quasimode report of the normal form stays below the log-scale bound") {
    const NormalFormResult nf = quantum_bnf_symbols(transverse_symbol(1.0, 1, 22), {2.0}, 10);
    const double h = 1.0 / 1024;
    const QuasimodeReport r = quasimode_report(make_plan(nf, 2, 0.3, h), make_cutoff(0.3), 1.0, 0.0);
    CHECK(r.measured_width < r.width_bound);
    CHECK(r.mass_outside >= 0.0);
    CHECK(r.mass_outside < 1e-4);
    CHECK(r.central_energy == 1.0);
    CHECK(r.T == doctest::Approx(0.7 * std::log(1024.0) / 4));
}
