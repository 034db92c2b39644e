#include "logscar/birkhoff.hpp"
#include "logscar/error.hpp"
#include "logscar/quantize.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace logscar;

namespace {

PolySymbol mono(int a, int b, int k, Complex c) { return PolySymbol::monomial(MultiIndex{a}, MultiIndex{b}, k, c); }

using Point = std::array<double, 2>;

// Hamiltonian flow of g for unit time, RK4.
Point flow(const PolySymbol& g, Point z, int steps = 400) {
    const PolySymbol gx = derivative_x(g, 0), gxi = derivative_xi(g, 0);
    auto f = [&](const Point& p) -> Point {
        return {evaluate(gxi, {p[0]}, {p[1]}, 0.0).real(), -evaluate(gx, {p[0]}, {p[1]}, 0.0).real()};
    };
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
        const Point k1 = f(z);
        const Point k2 = f({z[0] + h / 2 * k1[0], z[1] + h / 2 * k1[1]});
        const Point k3 = f({z[0] + h / 2 * k2[0], z[1] + h / 2 * k2[1]});
        const Point k4 = f({z[0] + h * k3[0], z[1] + h * k3[1]});
        z = {z[0] + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]), z[1] + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
    }
    return z;
}

} // namespace

TEST_CASE("cubic example: generator x^3/6 and no remainder") {
    const PolySymbol p = mono(1, 1, 0, 2.0) + mono(3, 0, 0, 1.0);
    const NormalFormResult nf = classical_bnf(p, {2.0}, 3);
    REQUIRE(nf.generators.size() == 1);
    CHECK((nf.generators[0] - mono(3, 0, 0, 1.0 / 6)).max_abs_coeff() < 1e-14);
    CHECK((nf.resonant - mono(1, 1, 0, 2.0)).max_abs_coeff() < 1e-14);
    CHECK(nf.remainder.max_abs_coeff() < 1e-14);
}

TEST_CASE("transverse symbol jet") {
    const PolySymbol t = transverse_symbol(1.0, 1, 6);
    CHECK(t.coeff({MultiIndex{0}, MultiIndex{2}, 0}) == Complex{1.0});
    CHECK(t.coeff({MultiIndex{2}, MultiIndex{0}, 0}) == Complex{-1.0});
    CHECK(t.coeff({MultiIndex{2}, MultiIndex{2}, 0}) == Complex{1.0});
    CHECK(t.coeff({MultiIndex{4}, MultiIndex{0}, 0}) == Complex{1.0});
    CHECK(t.coeff({MultiIndex{6}, MultiIndex{0}, 0}) == Complex{-1.0});
    CHECK(std::abs(t.coeff({MultiIndex{0}, MultiIndex{0}, 2}) - 0.5) < 1e-15);
    CHECK(t.is_real());
}

TEST_CASE("linear normalization of the inverted oscillator") {
    const LinearNormalization ln = normalize_quadratic(transverse_symbol(1.0, 1, 2));
    REQUIRE(ln.lambda.size() == 1);
    CHECK(ln.lambda[0] == doctest::Approx(2.0));
    Eigen::Matrix2d J;
    J << 0, 1, -1, 0;
    CHECK((ln.S.transpose() * J * ln.S - J).norm() < 1e-13);
    const PolySymbol q = ln.transformed.filtered([](const SymbolKey& k, Complex) { return k.k == 0; });
    CHECK((q - mono(1, 1, 0, 2.0)).max_abs_coeff() < 1e-13);
}

TEST_CASE("normal forms contain only resonant terms") {
    for (bool quantum : {false, true}) {
        const PolySymbol t = transverse_symbol(1.0, 1, 14);
        const NormalFormResult nf = quantum ? quantum_bnf_symbols(t, {2.0}, 6) : classical_bnf(t, {2.0}, 6);
        for (const auto& [k, v] : nf.resonant.terms()) CHECK(k.alpha == k.beta);
        CHECK(nf.resonant.is_real(1e-12));
    }
}

TEST_CASE("round trip through the generator flows") {
    const PolySymbol t = transverse_symbol(1.0, 1, 10);
    for (bool quantum : {false, true}) {
        const NormalFormResult nf = quantum ? quantum_bnf_symbols(t, {2.0}, 4) : classical_bnf(t, {2.0}, 4);
        CHECK((undo_normal_form(nf, 8) - nf.normalized_input.truncated(8)).max_abs_coeff() < 1e-10);
    }
}

TEST_CASE("classical normal form agrees with RK4 flows of the generators") {
    const NormalFormResult nf = classical_bnf(transverse_symbol(1.0, 1, 8), {2.0}, 8);
    const PolySymbol total = nf.resonant + nf.remainder;
    for (const Point z0 : {Point{0.08, 0.03}, Point{-0.05, 0.1}, Point{0.02, -0.07}}) {
        Point z = z0;
        for (std::size_t i = nf.generators.size(); i-- > 0;) z = flow(nf.generators[i], z);
        const double lhs = evaluate(nf.normalized_input, {z[0]}, {z[1]}, 0.0).real();
        const double rhs = evaluate(total, {z0[0]}, {z0[1]}, 0.0).real();
        CHECK(std::abs(lhs - rhs) < 1e-11);
    }
}

TEST_CASE("bad inputs are rejected") {
    const PolySymbol t = transverse_symbol(1.0, 1, 6);
    CHECK_THROWS_AS(classical_bnf(t, {3.0}, 4), ConfigError);
    CHECK_THROWS_AS(classical_bnf(t + mono(1, 0, 0, 0.5), {2.0}, 4), ConfigError);
}

TEST_CASE("quantum normal form commutes with the dilation generator") {
    const NormalFormResult nf = quantum_bnf_symbols(transverse_symbol(1.0, 1, 14), {2.0}, 6);
    const double h = 1.0 / 256;
    const HamiltonianMatrix A = quantize(mono(1, 1, 0, 2.0), h, 80), Q = quantize(nf.resonant, h, 80);
    const HamiltonianMatrix C = commutator(A, Q);
    CHECK(interior_norm(C.entries, 1, 80, C.interior) < 1e-10 * interior_norm(product(A, Q).entries, 1, 80, C.interior));
}

TEST_CASE("dense conjugator is unitary; its remainder shrinks as N grows") {
    const double h = 1.0 / 64;
    double prev = 1.0;
    for (int n : {4, 6, 8}) {
        const QuantumNormalForm q = quantum_bnf(transverse_symbol(1.0, 1, 2 * n + 2), {2.0}, n, h, 60);
        CHECK(conjugator_unitarity_defect(q) < 1e-10);
        const double rel = interior_norm(q.remainder_matrix.entries, 1, 60, 8) / interior_norm(q.nf_matrix.entries, 1, 60, 8);
        CHECK(rel < prev / 3);
        prev = rel;
    }
}

TEST_CASE("factor_linear_map recovers dilation and rotation") {
    const double s = 0.4, th = 0.7;
    Eigen::Matrix2d D, R;
    D << std::exp(s), 0, 0, std::exp(-s);
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const AxisMetaplectic m = factor_linear_map(D * R);
    CHECK(m.sigma[0] == doctest::Approx(s));
    CHECK(m.theta[0] == doctest::Approx(th));
    Eigen::Matrix2d shear;
    shear << 1, 1, 0, 1;
    CHECK_THROWS(factor_linear_map(shear));
}

TEST_CASE("metaplectic rotation intertwines Op(x) with the rotated symbol") {
    const double h = 0.1, th = 0.6;
    const PolySymbol rotated = PolySymbol::x(1, 0) * std::cos(th) - PolySymbol::xi(1, 0) * std::sin(th);
    for (int m = 0; m < 5; ++m)
        for (int n = 0; n < 5; ++n) {
            const auto u = basis_state(h, MultiIndex{m}), v = basis_state(h, MultiIndex{n});
            const Complex lhs = inner_product(rotate(u, {th}), apply_weyl(PolySymbol::x(1, 0), rotate(v, {th})));
            const Complex rhs = inner_product(u, apply_weyl(rotated, v));
            CHECK(std::abs(lhs - rhs) < 1e-13);
        }
}

TEST_CASE("conjugator transports expectations of the normal form") {
    // remainder O(|z|^{N+1}) gives an expectation error of order hbar^{(N+1)/2}
    const PolySymbol t = transverse_symbol(1.0, 1, 14);
    const NormalFormResult nf = quantum_bnf_symbols(t, {2.0}, 6);
    std::vector<double> err;
    for (double h : {0.01, 0.005}) {
        const auto phi = basis_state(h, MultiIndex{0});
        const auto u = apply_conjugator(nf, phi, 160);
        CHECK(u.norm() == doctest::Approx(1.0).epsilon(1e-10));
        const auto ue = unsqueeze(u, 260);
        err.push_back(std::abs(inner_product(ue, apply_weyl(t, ue)) - inner_product(phi, apply_weyl(nf.resonant, phi))));
        const auto u2 = apply_conjugator(nf, phi, 220);
        const double diff2 = u.norm_sq() + u2.norm_sq() - 2.0 * inner_product(u, u2).real();
        CHECK(std::sqrt(std::max(0.0, diff2)) < 1e-6);
    }
    CHECK(err[0] < 1e-7);
    CHECK(err[0] / err[1] > 8.0);
}
