// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "logscar/birkhoff.hpp"
#include "logscar/cutoff.hpp"
#include "logscar/fermi.hpp"
#include "logscar/propagation.hpp"
#include "logscar/quantize.hpp"
#include "logscar/quasimode.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace logscar;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3g", v);
    return b;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= x.size();
    my /= y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
    return sxy / sxx;
}

PolySymbol random_cubic(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PolySymbol p(1);
    for (int a = 0; a <= 3; ++a)
        for (int b = 0; a + b <= 3; ++b) p.add_term({MultiIndex{a}, MultiIndex{b}, 0}, u(rng));
    return p;
}

double max_coeff_diff(const PolySymbol& a, const PolySymbol& b) { return (a - b).max_abs_coeff(); }

Outcome ground_overlap() {
    const double hbar = 1.0 / 256;
    const SqueezedHermiteState g = ground_state(hbar, 1);
    double worst = 0.0;
    for (double lam : {1.0, 2.0, 4.0})
        for (int i = -500; i <= 500; ++i) {
            const double s = 0.01 * i;
            const Complex ov = inner_product(g, dilate(g, {lam * s}));
            worst = std::max(worst, std::abs(ov - 1.0 / std::sqrt(std::cosh(lam * s))));
        }
    return {worst <= 1e-8, "max |<Phi0, D Phi0> - cosh^-1/2| = " + num(worst)};
}

Outcome moyal_consistency() {
    std::mt19937_64 rng(20240611);
    const double hbar = 1.0 / 16;
    double worst_m = 0.0, worst_a = 0.0;
    for (int i = 0; i < 50; ++i) {
        const PolySymbol p = random_cubic(rng), q = random_cubic(rng), s = random_cubic(rng);
        worst_m = std::max(worst_m, matrix_consistency(p, q, hbar, 64, 32));
        worst_a = std::max(worst_a, max_coeff_diff(moyal_product(moyal_product(p, q), s),
                                                   moyal_product(p, moyal_product(q, s))));
    }
    return {worst_m <= 1e-8 && worst_a <= 1e-12,
            "matrix consistency " + num(worst_m) + ", associativity " + num(worst_a)};
}

Outcome birkhoff_purity() {
    const PolySymbol ts = transverse_symbol(1.0, 1, 6);
    const NormalFormResult nf = classical_bnf(ts, {2.0}, 6);
    bool pure = true;
    for (const auto& [k, v] : nf.resonant.terms())
        if (grading_eigenvalue(k.alpha, k.beta, nf.lambda) != 0.0 && std::abs(v) > 0.0) pure = false;
    const double trip = max_coeff_diff(undo_normal_form(nf, 6), nf.normalized_input.truncated(6));
    const NormalFormResult qnf = quantum_bnf_symbols(ts, {2.0}, 6);
    const PolySymbol gen = PolySymbol::monomial(MultiIndex{1}, MultiIndex{1}, 0, 2.0);
    double worst = 0.0;
    for (int e : {8, 10, 12}) {
        const double h = std::pow(2.0, -e);
        const HamiltonianMatrix A = quantize(gen, h, 96), Q = quantize(qnf.resonant, h, 96);
        const HamiltonianMatrix C = commutator(A, Q), P = product(A, Q);
        worst = std::max(worst, interior_norm(C.entries, 1, 96, C.interior) / interior_norm(P.entries, 1, 96, C.interior));
    }
    return {pure && trip <= 1e-8 && worst <= 1e-8, std::string(pure ? "resonant only" : "NONRESONANT TERMS") +
                                                       ", round trip " + num(trip) + ", commutator " + num(worst)};
}

NormalFormResult model_nf(int degree_cap) {
    return quantum_bnf_symbols(transverse_symbol(1.0, 1, 2 * degree_cap + 2), {2.0}, degree_cap);
}

Outcome dyson_order() {
    const NormalFormResult nf = model_nf(10);
    std::string d;
    bool ok = true;
    for (int l : {1, 2}) {
        std::vector<double> x, y;
        for (int e = 8; e <= 13; ++e) {
            const double h = std::pow(2.0, -e);
            const EvolutionPlan plan = make_plan(nf, l, 0.3, h);
            x.push_back(std::log(h));
            y.push_back(std::log(dyson_error(plan, ehrenfest_time(plan))));
        }
        const double slope = least_squares_slope(x, y);
        ok = ok && slope >= l + 0.7;
        d += (l > 1 ? ", " : "") + std::string("l=") + std::to_string(l) + " slope " + num(slope) + " (need " +
             num(l + 0.7) + ")";
    }
    return {ok, d};
}

Outcome localization() {
    const NormalFormResult nf = model_nf(10);
    double prev = 2.0, last = 0.0;
    bool monotone = true;
    std::string d = "mass";
    for (int e = 8; e <= 12; ++e) {
        const double h = std::pow(2.0, -e);
        const EvolutionPlan plan = make_plan(nf, 2, 0.3, h);
        last = microlocal_mass_outside(evolve_full(plan, ehrenfest_time(plan)), std::pow(h, 0.1));
        monotone = monotone && last <= prev;
        prev = last;
        d += " " + num(last);
    }
    return {monotone && last <= 0.01, d + (monotone ? " (nonincreasing)" : " (NOT monotone)") + ", need <= 0.01 at 2^-12"};
}

Outcome norm_asymptotics() {
    const double h = 1.0 / 4096;
    const CutoffProfile chi = make_cutoff(0.3);
    const double S = s_function({2.0}, 0.0, 1);
    const double oracle = std::beta(0.25, 0.5) / 2.0;
    bool ok = std::abs(S - oracle) <= 1e-8;
    std::string d = "S = " + num(S) + " (oracle diff " + num(std::abs(S - oracle)) + "); |ratio-1|*T:";
    const EvolutionPlan plan = quadratic_plan({2.0}, 0.3, h);
    for (double T : {5.0, 10.0, 20.0, 40.0}) {
        const AveragedState psi = time_average(plan, chi, T, 0.0);
        const double dev = std::abs(psi.norm_sq / (T * S * chi.l2_norm() * chi.l2_norm()) - 1.0);
        ok = ok && dev <= 3.0 / T;
        d += " " + num(dev * T);
    }
    return {ok, d + " (need <= 3)"};
}

Outcome width_law() {
    const CutoffProfile chi = make_cutoff(0.3);
    const double C = width_constant(2.0, 0.3);
    bool law = true, bound = true;
    double lo = 1e9, hi = 0, worst = 0;
    for (int e = 8; e <= 13; ++e) {
        const double h = std::pow(2.0, -e);
        const EvolutionPlan plan = quadratic_plan({2.0}, 0.3, h);
        const double T = ehrenfest_time(plan);
        const AveragedState psi = time_average(plan, chi, T, 0.0);
        const double w = std::sqrt(psi.width_sq / psi.norm_sq);
        const double ratio = w * T / (h * chi.ratio());
        lo = std::min(lo, ratio), hi = std::max(hi, ratio);
        law = law && ratio >= 0.9 && ratio <= 1.1;
        const double b = C * h / std::abs(std::log(h));
        worst = std::max(worst, w / b);
        bound = bound && w <= b;
    }
    return {law && bound, "width*T/(hbar ratio) in [" + num(lo) + ", " + num(hi) + "] (need [0.9, 1.1]); width/bound <= " +
                              num(worst)};
}

CylinderConfig cylinder_config(double L, int e) {
    CylinderConfig c;
    c.L = L;
    c.epsilon2 = 0.45;
    c.degree_cap = 6;
    c.hbar = std::pow(2.0, -e);
    return c;
}

std::map<std::pair<double, int>, CylinderResult> g_cylinder;

const CylinderResult& cylinder(double L, int e) {
    auto key = std::make_pair(L, e);
    auto it = g_cylinder.find(key);
    if (it == g_cylinder.end()) it = g_cylinder.emplace(key, run_cylinder(cylinder_config(L, e))).first;
    return it->second;
}

Outcome transfer_for(double L, bool with_model_bound) {
    bool ok = true;
    double worst = 0.0, least = 1.0;
    for (int e = 8; e <= 11; ++e) {
        const CylinderResult& r = cylinder(L, e);
        worst = std::max(worst, r.residual / r.bound);
        least = std::min(least, r.husimi_mass);
        ok = ok && r.residual <= r.bound && r.husimi_mass >= 0.95;
        if (with_model_bound) ok = ok && r.nf_width <= r.report.width_bound;
    }
    return {ok, "residual/bound <= " + num(worst) + ", Husimi mass >= " + num(least)};
}

Outcome transfer() { return transfer_for(1.0, false); }

Outcome partial_loc() {
    const CylinderConfig cfg = cylinder_config(1.0, 10);
    const PartialLocalization p = partial_localization(cylinder(1.0, 10), cfg);
    return {p.retained_mass >= p.lower_bound,
            "retained " + num(p.retained_mass) + " (need >= " + num(p.lower_bound) + "), " +
                std::to_string(p.eigen_count) + " eigenvalues in window"};
}

Outcome uniformity() {
    bool ok = true;
    std::string d;
    for (double L : {1.0, 2.0, 5.0}) {
        const Outcome o = transfer_for(L, true);
        ok = ok && o.pass;
        d += (L > 1 ? "; L=" : "L=") + num(L) + ": " + o.detail;
    }
    return {ok, "C = " + num(width_constant(2.0, 0.45)) + " for all L; " + d};
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget;  // seconds
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> all = {
        {1, "ground-overlap law", 5, ground_overlap},
        {2, "Moyal/quantization consistency", 30, moyal_consistency},
        {3, "Birkhoff purity and round trip", 120, birkhoff_purity},
        {4, "Dyson order law", 120, dyson_order},
        {5, "localization at Ehrenfest time", 60, localization},
        {6, "norm asymptotics", 60, norm_asymptotics},
        {7, "width law and constant", 120, width_law},
        {8, "end-to-end transfer on the cylinder", 600, transfer},
        {9, "partial localization", 120, partial_loc},
        {10, "uniformity in the geodesic length", 1800, uniformity},
    };
    int failed = 0;
    for (const auto& c : all) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = dt <= c.budget;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("[%s] %2d %s: %s; %.1f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    dt, c.budget, in_time ? "" : ", EXCEEDED");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed ? 1 : 0;
}
