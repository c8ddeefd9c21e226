#include "wfisher/wfisher.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace wfisher;

namespace {

void BM_AdjustMomentsBinomial(benchmark::State& state) {
    const DiscreteDist d = make_binomial(static_cast<int>(state.range(0)), 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(adjust_moments(d));
    }
}
BENCHMARK(BM_AdjustMomentsBinomial)->Arg(5)->Arg(20)->Arg(200);

void BM_MakeFisherNchg(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(make_fisher_nchg(4000, 4000, state.range(0), 1.0));
    }
}
BENCHMARK(BM_MakeFisherNchg)->Arg(5)->Arg(50);

void BM_WassersteinStepGrid(benchmark::State& state) {
    std::vector<double> support, masses;
    for (int i = 1; i <= 100; ++i) {
        support.push_back(i);
        masses.push_back(0.001);
    }
    support.push_back(101.0);
    masses.push_back(0.9);
    const AdjustmentSet set{DiscreteDist(support, masses)};
    const DiscreteDist z = set.mean_chi2_table().as_dist();
    const ContinuousTarget chisq = ContinuousTarget::chisq2();
    for (auto _ : state) {
        benchmark::DoNotOptimize(wasserstein_p_pow(z, chisq, 2.0));
    }
}
BENCHMARK(BM_WassersteinStepGrid);

void BM_GammaQuantile(benchmark::State& state) {
    const GammaParams g{static_cast<double>(state.range(0)), 1.805};
    double p = 0.0001;
    for (auto _ : state) {
        p += 0.0001;
        if (p >= 0.999) p = 0.0001;
        benchmark::DoNotOptimize(gamma_quantile(p, g));
    }
}
BENCHMARK(BM_GammaQuantile)->Arg(4)->Arg(110)->Arg(1108);

void BM_SimulateType1(benchmark::State& state) {
    SimConfig cfg;
    cfg.scenario = IIDBinomialScenario{5, 0.5, 0.5};
    cfg.n_tests = static_cast<std::size_t>(state.range(0));
    cfg.n_reps = 2000;
    cfg.seed = 1;
    cfg.max_threads = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_type1(cfg));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(cfg.n_reps * cfg.n_tests));
}
BENCHMARK(BM_SimulateType1)->Arg(40)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
