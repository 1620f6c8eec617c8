// SPDX-License-Identifier: Apache-2.0
// Serial reference against the OpenMP path for the data-parallel kernels.
// The second argument selects the policy: 0 serial, 1 parallel.
#include "shearlab/exec.hpp"
#include "shearlab/levelset.hpp"
#include "shearlab/resolvent.hpp"
#include "shearlab/semigroup.hpp"
#include "shearlab/sweep.hpp"

#include <benchmark/benchmark.h>

#include <numbers>

using namespace shear;

namespace {

Exec policy(const benchmark::State& state) { return state.range(1) ? Exec::Parallel : Exec::Serial; }

void label(benchmark::State& state)
{
    state.SetLabel(state.range(1) ? "parallel x" + std::to_string(max_threads()) : "serial");
}

void BM_SigmaScan(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto op = assemble(profiles::kolmogorov(), Grid1D{0.0, 2 * std::numbers::pi, n}, 1e-4, 1.0, 0.0);
    std::vector<double> lambdas(256);
    for (std::size_t i = 0; i < lambdas.size(); ++i) lambdas[i] = -1.1 + 2.2 * static_cast<double>(i) / 255.0;
    for (auto _ : state) benchmark::DoNotOptimize(sigma_scan(op, lambdas, {}, policy(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(lambdas.size()));
    label(state);
}
BENCHMARK(BM_SigmaScan)->ArgsProduct({{2000, 20000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_MeasureSweep(benchmark::State& state)
{
    std::vector<double> lambdas(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        lambdas[i] = -1.5 + 3.0 * static_cast<double>(i) / static_cast<double>(lambdas.size() - 1);
    const std::vector<double> deltas{0.2, 0.1, 0.05, 0.025, 0.0125};
    const auto p = profiles::kolmogorov();
    for (auto _ : state)
        benchmark::DoNotOptimize(measure_sweep(p, lambdas, deltas, 2, {0.0, 2 * std::numbers::pi}, policy(state)));
    label(state);
}
BENCHMARK(BM_MeasureSweep)->ArgsProduct({{61, 601}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_DecayEnsemble(benchmark::State& state)
{
    const auto p = profiles::poiseuille();
    const Grid1D g{-1.0, 1.0, static_cast<std::size_t>(state.range(0))};
    DecayConfig cfg;
    cfg.method = DecayMethod::Ensemble;
    cfg.checkpoints = 12;
    cfg.exec = policy(state);
    for (auto _ : state) benchmark::DoNotOptimize(operator_norm_decay_on(p, g, 1e-3, 1.0, 0.05, 30.0, cfg));
    label(state);
}
BENCHMARK(BM_DecayEnsemble)->ArgsProduct({{1000, 10000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_PsiSweep(benchmark::State& state)
{
    SweepOptions o;
    o.exec = policy(state);
    o.search.exec = policy(state);
    o.search.check_grid = false;
    const std::vector<double> nus{1e-2, 1e-3, 1e-4, 1e-5};
    for (auto _ : state) benchmark::DoNotOptimize(psi_sweep(profiles::poiseuille(), nus, {1.0}, o));
    label(state);
}
BENCHMARK(BM_PsiSweep)->ArgsProduct({{0}, {0, 1}})->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
