#include <benchmark/benchmark.h>

#include "stocklab/dqn.hpp"
#include "stocklab/ensembles.hpp"
#include "stocklab/envs.hpp"
#include "stocklab/forecast.hpp"
#include "stocklab/ingest.hpp"
#include "stocklab/rng.hpp"

using namespace stocklab;

namespace {

Frame bench_frame(std::size_t n_days) {
    SynthConfig config;
    config.n_days = n_days;
    config.seed = 1;
    return clean(generate_synthetic(config));
}

void ForecasterFit(benchmark::State& state) {
    const Frame frame = bench_frame(static_cast<std::size_t>(state.range(0)));
    const auto ds = frame.timestamps("Date");
    const auto y = frame.numeric("Quantity Replenished");
    ForecasterConfig config;
    for (auto _ : state) {
        auto model = fit_forecaster(ds, y, {}, config);
        benchmark::DoNotOptimize(model.residual_sd);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(ForecasterFit)->Arg(200)->Arg(400)->Arg(800)->Complexity();

void TreeFit(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(2);
    Matrix X(n, 8);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 8; ++c) X.at(i, c) = rng.uniform(-1.0, 1.0);
        y[i] = 3.0 * X.at(i, 0) - X.at(i, 3) + rng.normal(0.0, 0.1);
    }
    TreeConfig config;
    config.max_depth = 8;
    for (auto _ : state) {
        auto tree = fit_tree(X, y, config, 7);
        benchmark::DoNotOptimize(tree.nodes.size());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(TreeFit)->Arg(256)->Arg(1024)->Arg(4096)->Complexity();

void EnvStep(benchmark::State& state) {
    const Frame frame = bench_frame(256);
    auto env = make_env(ModelKind::dual_sourcing, frame,
                        default_costs(ModelKind::dual_sourcing), true);
    env.reset();
    Rng rng(3);
    for (auto _ : state) {
        const auto outcome = env.step(static_cast<std::size_t>(rng.uniform_int(0, 3)));
        benchmark::DoNotOptimize(outcome.reward);
    }
}
BENCHMARK(EnvStep);

void ReplayStep(benchmark::State& state) {
    AgentConfig config = default_agent_config(ModelKind::lost_sales);
    DqnAgent agent(config, 4);
    Rng rng(5);
    for (int i = 0; i < 200; ++i)
        agent.remember({{rng.uniform(), rng.uniform(), rng.uniform()},
                        static_cast<std::size_t>(rng.uniform_int(0, 2)),
                        rng.uniform(-100.0, 0.0),
                        {rng.uniform(), rng.uniform(), rng.uniform()},
                        i % 50 == 0});
    for (auto _ : state) {
        benchmark::DoNotOptimize(agent.replay(10));
    }
}
BENCHMARK(ReplayStep);

}  // namespace

BENCHMARK_MAIN();
