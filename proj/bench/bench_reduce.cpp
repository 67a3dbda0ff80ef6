// Serial reference vs parallel Monte-Carlo reduction on Euler paths.
#include <benchmark/benchmark.h>

#include "levy_euler/harness.hpp"

using namespace levy_euler;

namespace {
Experiment sinusoidal_experiment()
{
    FieldParams p;
    p.a_amplitude = {1.0};
    p.b_amplitude = {0.3};
    Experiment e;
    e.field = builtin_field("sinusoidal", p);
    e.driver = {1.5, 1};
    e.jumps.rate = 1.0;
    e.jumps.jump = AtomJumps{{{0.5}}, {1.0}};
    e.jumps.driver_alpha = 1.5;
    e.x0 = {0.0};
    return e;
}

void run(benchmark::State& state, Execution execution)
{
    auto const e = sinusoidal_experiment();
    Functional const g{Functional::Kind::terminal, gaussian_mixture(1, {1.0}, {0.0}, {1.0})};
    McOptions mc;
    mc.n_paths = 1 << 14;
    mc.execution = execution;
    mc.workers = static_cast<int>(state.range(0));
    auto const grid = TimeGrid::uniform(1.0, 64);
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(estimate_expectation(g, e, grid, mc, 1).mean);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mc.n_paths));
}

void BM_serial_reference(benchmark::State& state) { run(state, Execution::serial_reference); }
void BM_parallel(benchmark::State& state) { run(state, Execution::parallel); }
}  // namespace

BENCHMARK(BM_serial_reference)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_parallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
