#include "sinrldp/connectivity.hpp"
#include "sinrldp/detection.hpp"
#include "sinrldp/information.hpp"
#include "sinrldp/measures.hpp"
#include "sinrldp/realization.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace sinrldp;

namespace {

NetworkModel annealed(double lambda) {
    NetworkModel m;
    m.params.lambda = lambda;
    m.limit = LimitKernel::constant(0.7);
    return m;
}

}  // namespace

static void BM_SamplePpp(benchmark::State& state) {
    ModelParams p;
    p.lambda = static_cast<double>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(assign_marks(sample_ppp(p, Domain{}, seed), p.c, seed));
        ++seed;
    }
}
BENCHMARK(BM_SamplePpp)->Arg(100)->Arg(1600);

static void BM_QuenchedGraph(benchmark::State& state) {
    ModelParams p;
    p.lambda = static_cast<double>(state.range(0));
    p.iota = ThresholdFunction::constant(0.05);
    const auto s = assign_marks(sample_ppp(p, Domain{}, 1), p.c, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_quenched_graph(s, p));
    }
    state.counters["nodes"] = static_cast<double>(s.size());
}
BENCHMARK(BM_QuenchedGraph)->Arg(100)->Arg(400);

static void BM_AnnealedRealization(benchmark::State& state) {
    const auto m = annealed(static_cast<double>(state.range(0)));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate_realization(m, seed++));
    }
}
BENCHMARK(BM_AnnealedRealization)->Arg(400)->Arg(1600);

static void BM_TLambdaD(benchmark::State& state) {
    ConnectivityKernel k;
    k.quadrature_resolution = static_cast<std::size_t>(state.range(0));
    const MarkedPoint a{{0.3, 0.4}, 1.0};
    const MarkedPoint b{{0.35, 0.45}, 0.7};
    for (auto _ : state) {
        benchmark::DoNotOptimize(t_lambda_d(k, a, b));
    }
}
BENCHMARK(BM_TLambdaD)->Arg(32)->Arg(128);

static void BM_Measures(benchmark::State& state) {
    const auto m = annealed(1600.0);
    const auto y = generate_realization(m, 3);
    const BinGrid g(m.domain, m.params.c, 8, 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(m1(y.sample, g, 1600.0));
        benchmark::DoNotOptimize(m2(y.sample, y.edges, g, 1600.0, m.a_lambda()));
    }
}
BENCHMARK(BM_Measures);

static void BM_KullbackDual(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(5);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> phi(n), nu(n);
    for (std::size_t i = 0; i < n; ++i) {
        phi[i] = e(rng);
        nu[i] = e(rng) + 1e-3;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(kullback_action_dual(phi, nu));
    }
}
BENCHMARK(BM_KullbackDual)->Arg(16)->Arg(512 * 512);

static void BM_TestStatistic(benchmark::State& state) {
    const auto m = annealed(800.0);
    std::vector<SinrRealization> reps;
    for (std::uint64_t i = 0; i < 20; ++i) {
        reps.push_back(generate_realization(m, 100 + i));
    }
    const auto est = estimate(reps, BinGrid(m.domain, m.params.c, 2, 2));
    const auto y = generate_realization(m, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(test_statistic(y, est));
    }
}
BENCHMARK(BM_TestStatistic);
BENCHMARK_MAIN();
