#include "logscar/birkhoff.hpp"
#include "logscar/cutoff.hpp"
#include "logscar/grid.hpp"
#include "logscar/hermite.hpp"
#include "logscar/propagation.hpp"
#include "logscar/quasimode.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

using namespace logscar;

namespace {

PolySymbol random_symbol(int degree, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PolySymbol p(1);
    for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + b <= degree; ++b) p.add_term({MultiIndex{a}, MultiIndex{b}, 0}, u(rng));
    return p;
}

void BM_squeeze_overlaps(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(squeeze_overlaps(1.3, n, n));
    st.SetComplexityN(n);
}
BENCHMARK(BM_squeeze_overlaps)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_moyal_product(benchmark::State& st) {
    const int d = static_cast<int>(st.range(0));
    const PolySymbol p = random_symbol(d, 1), q = random_symbol(d, 2);
    for (auto _ : st) benchmark::DoNotOptimize(moyal_product(p, q));
}
BENCHMARK(BM_moyal_product)->DenseRange(3, 9, 2);

void BM_quantum_bnf(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    const PolySymbol t = transverse_symbol(1.0, 1, 2 * N + 2);
    for (auto _ : st) benchmark::DoNotOptimize(quantum_bnf_symbols(t, {2.0}, N));
}
BENCHMARK(BM_quantum_bnf)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_time_average(benchmark::State& st) {
    const double h = std::pow(2.0, -static_cast<double>(st.range(0)));
    const EvolutionPlan plan = quadratic_plan({2.0}, 0.3, h);
    const CutoffProfile chi = make_cutoff(0.3);
    const double T = ehrenfest_time(plan);
    for (auto _ : st) benchmark::DoNotOptimize(time_average(plan, chi, T, 0.0));
}
BENCHMARK(BM_time_average)->DenseRange(8, 14, 2)->Unit(benchmark::kMillisecond);

void BM_collar_laplacian(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    CollarField f{CollarGrid{1.0, 0.5, n, n, 1, 1}, Eigen::MatrixXcd::Random(n, n)};
    for (auto _ : st) benchmark::DoNotOptimize(collar_laplacian_apply(f, 0.01));
    st.SetItemsProcessed(st.iterations() * n * n);
}
BENCHMARK(BM_collar_laplacian)->RangeMultiplier(2)->Range(64, 512);

} // namespace

BENCHMARK_MAIN();
