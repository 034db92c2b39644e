#include "logscar/error.hpp"
#include "logscar/propagation.hpp"
#include "logscar/quantize.hpp"

#include <doctest.h>

#include <cmath>

using namespace logscar;

namespace {

const NormalFormResult& model_nf() {
    static const NormalFormResult nf = quantum_bnf_symbols(transverse_symbol(1.0, 1, 22), {2.0}, 10);
    return nf;
}

// e^{-x} sum_{j <= n} x^j / j!
double poisson_tail(int n, double x) {
    double term = std::exp(-x), s = 0.0;
    for (int j = 0; j <= n; ++j) {
        s += term;
        term *= x / (j + 1);
    }
    return s;
}

} // namespace

TEST_CASE("Ehrenfest time formula and validation") {
    CHECK(ehrenfest_time(0.3, 0.01, 2.0) == doctest::Approx(0.7 * std::log(100.0) / 4.0));
    CHECK_THROWS_AS(ehrenfest_time(0.0, 0.01, 2.0), ConfigError);
    CHECK_THROWS_AS(ehrenfest_time(0.3, 0.9, 2.0), ConfigError);
    CHECK_THROWS_AS(ehrenfest_time(1.5, 0.01, 2.0), ConfigError);
}

TEST_CASE("quadratic evolution is an exact dilation") {
    const auto g = ground_state(0.01, 1);
    const auto s = evolve_quadratic(g, 0.7, {2.0});
    CHECK(s.squeeze()[0] == doctest::Approx(1.4));
    const EvolutionPlan plan = quadratic_plan({2.0}, 0.3, 0.01);
    FullPropagator prop(plan, 2.0);
    CHECK(prop.trivial());
    CHECK(std::abs(inner_product(prop.at(0.7), s) - 1.0) < 1e-14);
    CHECK(dyson_error(plan, 1.0) < 1e-14);
}

TEST_CASE("split of the plan into quadratic and nonquadratic parts") {
    const EvolutionPlan plan = make_plan(model_nf(), 2, 0.3, 1.0 / 256);
    CHECK(((quadratic_part(plan) + nonquadratic_part(plan)) - plan.resonant).max_abs_coeff() < 1e-15);
    CHECK(moyal_bracket(quadratic_part(plan), nonquadratic_part(plan)).chopped(1e-14).empty());
}

TEST_CASE("full propagator is unitary, certified, and matches a Chebyshev oracle") {
    const double h = 1.0 / 256;
    const EvolutionPlan plan = make_plan(model_nf(), 2, 0.3, h);
    const double T = ehrenfest_time(plan);
    FullPropagator prop(plan, T);
    CHECK(prop.truncation_error() < 1e-11);
    const auto inner = prop.inner(T);
    CHECK(inner.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const int cap = prop.basis_cap() + 40;
    const SparseMatrixC A = quantize_sparse(nonquadratic_part(plan), h, cap);
    const Eigen::VectorXcd v = expm_apply_chebyshev(A, T / h, Eigen::VectorXcd::Unit(cap, 0));
    CHECK((to_vector(inner, cap) - v).norm() < 1e-9);
    CHECK_THROWS_AS(evolve_full(plan, 2 * T), ConfigError);
}

TEST_CASE("Dyson expansion: coefficients and decreasing error with order") {
    const double h = 1.0 / 512;
    double prev = 1.0;
    for (int l = 1; l <= 3; ++l) {
        const EvolutionPlan plan = make_plan(model_nf(), l, 0.3, h);
        const double T = ehrenfest_time(plan);
        const DysonExpansion d = dyson_expand(plan, T);
        REQUIRE(d.terms.size() == static_cast<std::size_t>(l + 1));
        double fact = 1.0;
        for (const auto& term : d.terms) {
            if (term.p) fact *= term.p;
            CHECK(std::abs(term.coefficient - std::pow(Complex{0.0, -T / h}, term.p) / fact) < 1e-12 * std::abs(term.coefficient));
        }
        const double err = dyson_error(plan, T);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("anti-Wick mass outside a ball: closed forms for Hermite states") {
    const double h = 0.01;
    for (int n : {0, 1, 4})
        for (double R : {0.05, 0.2, 0.35}) {
            const double x = R * R / (2 * h);
            CHECK(microlocal_mass_outside(basis_state(h, MultiIndex{n}), R) == doctest::Approx(poisson_tail(n, x)).epsilon(1e-10));
        }
    CHECK_THROWS_AS(microlocal_mass_outside(ground_state(h, 1), 0.0), ConfigError);
}

TEST_CASE("evolved state spreads but stays mostly near the origin") {
    const double h = 1.0 / 1024;
    const EvolutionPlan plan = make_plan(model_nf(), 2, 0.3, h);
    const double T = ehrenfest_time(plan);
    const double R = std::pow(h, 0.1);
    const double early = microlocal_mass_outside(evolve_full(plan, 0.5 * T), R);
    const double late = microlocal_mass_outside(evolve_full(plan, T), R);
    CHECK(early <= late);
    CHECK(late < 0.1);
}
