#include "grpsis/meanfield.hpp"
#include "grpsis/network.hpp"
#include "grpsis/simulator.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace grpsis;

void BM_Sampling(benchmark::State& state, DistributionPtr dist) {
    Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(dist->sample(rng));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_Sampling, exponential, parse_distribution("dist=exponential mu=0.5"));
BENCHMARK_CAPTURE(BM_Sampling, powerlaw, parse_distribution("dist=powerlaw lambda=4 t0=1"));
BENCHMARK_CAPTURE(BM_Sampling, lognormal, parse_distribution("dist=lognormal mu=0 sigma=1"));
BENCHMARK_CAPTURE(BM_Sampling, tabulated, parse_distribution("dist=tabulated knots=0:0.2,1:1.5,3:0.4"));

void BM_GenerateRegular(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Rng rng(++seed);
        benchmark::DoNotOptimize(generate_regular(2500, k, rng));
    }
}
BENCHMARK(BM_GenerateRegular)->Arg(4)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_SimulateRun(benchmark::State& state, DistributionPtr dist, double beta) {
    Rng rng(5);
    const auto net = generate_regular(2500, 10, rng);
    SimulationParams params;
    params.beta = beta;
    params.check_invariants = false;
    std::uint64_t seed = 0;
    std::size_t events = 0;
    for (auto _ : state) {
        const auto traj = simulate(net, *dist, params, ++seed);
        events += traj.events_processed;
    }
    state.counters["events/s"] = benchmark::Counter(static_cast<double>(events), benchmark::Counter::kIsRate);
}
BENCHMARK_CAPTURE(BM_SimulateRun, exponential, parse_distribution("dist=exponential mu=0.5"), 0.26)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SimulateRun, powerlaw, parse_distribution("dist=powerlaw lambda=4 t0=1"), 0.3)
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SimulateRun, lognormal, parse_distribution("dist=lognormal mu=0 sigma=1"), 0.33)
    ->Unit(benchmark::kMillisecond);

void BM_SolvePde(benchmark::State& state) {
    const auto dist = parse_distribution("dist=powerlaw lambda=4 t0=1");
    PdeOptions options;
    options.dt = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_grp_pde(*dist, 0.3, 10.0, 0.3, {}, 50.0, options));
}
BENCHMARK(BM_SolvePde)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
