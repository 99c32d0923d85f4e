#include "homog/abstract.hpp"
#include "homog/evolution.hpp"
#include "homog/presets.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace homog;

namespace {

PeriodicProblem oscillatory() {
  PeriodicProblem p = preset_oscillatory_1d(true, true);
  p.lambda = admissible_lambda(p, 4);
  return p;
}

void BM_CellSolve1D(benchmark::State& state) {
  const PeriodicProblem p = preset_harmonic_1d();
  for (auto _ : state) benchmark::DoNotOptimize(build_fiber_model(p, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CellSolve1D)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CellSolve2D(benchmark::State& state) {
  RandomPresetOptions o;
  o.seed = 5;
  const PeriodicProblem p = preset_random_smooth(o);
  const FiberContext ctx = make_fiber_context(p, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_cell_problems(ctx));
}
BENCHMARK(BM_CellSolve2D)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_AssembleFiber(benchmark::State& state) {
  const FiberContext ctx = make_fiber_context(oscillatory(), static_cast<int>(state.range(0)));
  RVec k(1);
  k(0) = 0.7;
  for (auto _ : state) benchmark::DoNotOptimize(assemble_fiber(ctx, k, 0.1));
}
BENCHMARK(BM_AssembleFiber)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

void BM_FiberPropagator(benchmark::State& state) {
  const FiberModel fm = build_fiber_model(oscillatory(), static_cast<int>(state.range(0)));
  const BoxSetup box = make_box_length(fm, 0.0625, 4.0);
  for (auto _ : state) {
    const FiberPropagator prop(box, 3);
    benchmark::DoNotOptimize(prop.corrector_matrix(0.5, CorrectorVariant::with_smoothing));
  }
}
BENCHMARK(BM_FiberPropagator)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_SweepPoint(benchmark::State& state) {
  const FiberModel fm = build_fiber_model(oscillatory(), 8);
  SweepOptions o;
  o.box_length = 4.0;
  o.threads = 1;
  const double rate = sweep_rate(fm, o);
  for (auto _ : state) benchmark::DoNotOptimize(sweep_point(fm, 0.0625, 0.5, SweepMode::corrected, rate, o));
}
BENCHMARK(BM_SweepPoint)->Unit(benchmark::kMillisecond);

void BM_Threshold(benchmark::State& state) {
  std::mt19937_64 rng(11);
  RandomFamilySpec spec;
  spec.dim = state.range(0);
  spec.n = 2;
  const AbstractFamily f = random_family(rng, spec);
  for (auto _ : state) benchmark::DoNotOptimize(threshold(f));
}
BENCHMARK(BM_Threshold)->Arg(12)->Arg(24)->Arg(96)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
