#include "dbench/corpus.hpp"
#include "dbench/spectral.hpp"

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

using namespace dbench;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CVec random_vector(std::size_t n) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> d(0.0, 1.0);
    CVec v(n);
    for (auto& z : v) z = {d(rng), d(rng)};
    return v;
}

LinearMap dirac_for(int N, int rank) {
    const auto g = build_torus(kTwoPi, kTwoPi, N, N, [](double x, double y) { return 0.2 * std::cos(x) * std::sin(y); });
    return full_dirac(g, random_bundle(g, -1, 0.3, 3, rank));
}

void BM_DiracApplyParallel(benchmark::State& st) {
    const auto d = dirac_for(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const CVec x = random_vector(static_cast<std::size_t>(d.dim_dom()));
    CVec y(static_cast<std::size_t>(d.dim_cod()));
    for (auto _ : st) {
        d.apply(x, y);
        benchmark::DoNotOptimize(y.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(d.m.val.size()));
}

void BM_DiracApplySerial(benchmark::State& st) {
    const auto d = dirac_for(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
    const CVec x = random_vector(static_cast<std::size_t>(d.dim_dom()));
    CVec y(static_cast<std::size_t>(d.dim_cod()));
    for (auto _ : st) {
        d.apply_serial(x, y);
        benchmark::DoNotOptimize(y.data());
    }
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(d.m.val.size()));
}

void BM_Compose(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    const auto g = build_torus(kTwoPi, kTwoPi, N, N, [](double, double) { return 0.0; });
    const auto b = constant_curvature_bundle(g, -1);
    for (auto _ : st) {
        const auto dp = dplus(g, b);
        benchmark::DoNotOptimize(compose(adjoint(dp), dp).m.val.data());
    }
}

void BM_LowestEigenpairs(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    const auto g = build_torus(kTwoPi, kTwoPi, N, N, [](double, double) { return 0.0; });
    const auto b = constant_curvature_bundle(g, -1);
    const auto dp = dplus(g, b);
    const auto a = compose(adjoint(dp), dp);
    EigenOptions o;
    o.preconditioner = fourier_preconditioner(g, 1, Symbol::Dirac, 0.5);
    for (auto _ : st) benchmark::DoNotOptimize(smallest_eigenpairs(a, 4, o).eigenvalues.data());
}

}  // namespace

BENCHMARK(BM_DiracApplyParallel)->Args({64, 1})->Args({128, 1})->Args({64, 2});
BENCHMARK(BM_DiracApplySerial)->Args({64, 1})->Args({128, 1})->Args({64, 2});
BENCHMARK(BM_Compose)->Arg(32)->Arg(64);
BENCHMARK(BM_LowestEigenpairs)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
