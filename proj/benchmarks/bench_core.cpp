#include <benchmark/benchmark.h>

#include "shufflegrad/optimizer.hpp"
#include "shufflegrad/problems.hpp"
#include "shufflegrad/prox.hpp"
#include "shufflegrad/samplers.hpp"

using namespace shufflegrad;

namespace {

void BM_SamplerNextIndex(benchmark::State& state) {
    const Step n = state.range(0);
    SamplerState sampler = make_sampler(SamplerScheme::rr(), n, 1);
    Step t = 1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sampler.next_index(t));
        ++t;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SamplerNextIndex)->Arg(16)->Arg(256)->Arg(4096);

void BM_ProxStep(benchmark::State& state) {
    const std::size_t d = static_cast<std::size_t>(state.range(0));
    const Regularizer reg = Regularizer::sq_norm_plus_indicator(0.5, zeros(d), ConvexSet::ball(zeros(d), 1.0));
    vec x(d, 0.1), g(d, 0.02);
    for (auto _ : state) {
        benchmark::DoNotOptimize(prox_step(reg, x, g, 0.05));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ProxStep)->Arg(8)->Arg(64)->Arg(512);

void BM_OptimizerEpochs(benchmark::State& state) {
    const Step n = 64;
    const Step K = state.range(0);
    const FiniteSumProblem problem = random_lad_instance(
        n, 8, 3, Regularizer::indicator(ConvexSet::ball(zeros(8), 1.0)), true);
    RunConfig cfg;
    cfg.horizon = Horizon(K * n, n);
    cfg.x1 = zeros(8);
    cfg.schedule = StepSchedule::inv_sqrt_t(0.2, cfg.horizon);
    cfg.scheme = SamplerScheme::rr();
    for (auto _ : state) {
        cfg.seed += 1;
        benchmark::DoNotOptimize(run(problem, cfg));
    }
    state.SetItemsProcessed(state.iterations() * K * n);
}
BENCHMARK(BM_OptimizerEpochs)->Arg(4)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
