#include <coherekit/coherence.hpp>
#include <coherekit/discord.hpp>
#include <coherekit/entanglement.hpp>
#include <coherekit/eoc.hpp>
#include <coherekit/states.hpp>

#include <benchmark/benchmark.h>

using namespace coherekit;

namespace {

Dims square_dims(int d) { return {d, d}; }

}  // namespace

static void BM_PartialTrace(benchmark::State& state) {
  Rng rng(1);
  const DensityMatrix rho = random_mixed_state(square_dims(static_cast<int>(state.range(0))), rng);
  for (auto _ : state) benchmark::DoNotOptimize(partial_trace(rho, {0}));
}
BENCHMARK(BM_PartialTrace)->Arg(2)->Arg(3)->Arg(4)->Arg(6);

static void BM_CoherenceRe(benchmark::State& state) {
  Rng rng(2);
  const Dims dims = square_dims(static_cast<int>(state.range(0)));
  const DensityMatrix rho = random_mixed_state(dims, rng);
  const BasisList b = random_bases(dims, rng);
  for (auto _ : state) benchmark::DoNotOptimize(coherence_re(rho, b));
}
BENCHMARK(BM_CoherenceRe)->Arg(2)->Arg(3)->Arg(4)->Arg(6);

static void BM_CorrelatedEvaluator(benchmark::State& state) {
  Rng rng(3);
  const Dims dims = square_dims(static_cast<int>(state.range(0)));
  const DensityMatrix rho = random_mixed_state(dims, rng);
  const CorrelatedCoherenceEvaluator ev(rho);
  const BasisList b = random_bases(dims, rng);
  for (auto _ : state) benchmark::DoNotOptimize(ev(b));
}
BENCHMARK(BM_CorrelatedEvaluator)->Arg(2)->Arg(3)->Arg(4);

static void BM_DiscordSymMin(benchmark::State& state) {
  Rng rng(4);
  const DensityMatrix rho = random_mixed_state({2, 2}, rng);
  OptimizerConfig cfg;
  cfg.restarts = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(discord_sym_min(rho, cfg));
}
BENCHMARK(BM_DiscordSymMin)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_EofTwoQubit(benchmark::State& state) {
  Rng rng(5);
  const DensityMatrix rho = random_mixed_state({2, 2}, rng);
  for (auto _ : state) benchmark::DoNotOptimize(eof_two_qubit(rho));
}
BENCHMARK(BM_EofTwoQubit);

static void BM_EofNumeric(benchmark::State& state) {
  Rng rng(6);
  const DensityMatrix rho = random_mixed_state({2, 2}, rng, 2);
  OptimizerConfig cfg;
  cfg.restarts = 2;
  for (auto _ : state) benchmark::DoNotOptimize(eof_numeric(rho, cfg, 4));
}
BENCHMARK(BM_EofNumeric)->Unit(benchmark::kMillisecond);

static void BM_DeltaExtension(benchmark::State& state) {
  Rng rng(7);
  const DensityMatrix rho = random_mixed_state({2, 2}, rng);
  const PureEnsemble e = random_feasible_ensemble(rho, static_cast<int>(state.range(0)), rng);
  for (auto _ : state) {
    const ExtensionWitness w = delta_extension(e);
    benchmark::DoNotOptimize(cc_of_extension(w));
  }
}
BENCHMARK(BM_DeltaExtension)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
