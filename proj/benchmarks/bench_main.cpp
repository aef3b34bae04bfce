// Microbenchmarks for the transform, geometry, and stepping hot paths.
// Run ./imcf_bench --benchmark_filter=... to narrow down.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "imcf/calculus.hpp"
#include "imcf/flow.hpp"
#include "imcf/geometry.hpp"
#include "imcf/roundness.hpp"
#include "imcf/surface.hpp"
#include "imcf/transforms.hpp"

using namespace imcf;

namespace {

SphereField random_field(const GridPtr& g, unsigned seed) {
  std::mt19937 rng(seed);
  HarmonicCoeffs c(g);
  for (double& a : c.a) a = (static_cast<double>(rng()) / 4294967296.0 - 0.5);
  // Smooth decay so downstream geometry stays well conditioned.
  if (g->mode == GridMode::Full2D) {
    for (int l = 0; l <= g->L; ++l)
      for (int m = -l; m <= l; ++m)
        c.a[SphereGrid::coef_index(l, m)] /= std::pow(1.0 + l, 3);
  } else {
    for (int l = 0; l <= g->L; ++l) c.a[g->tri(l, 0)] /= std::pow(1.0 + l, 3);
  }
  return synthesis_values(c);
}

GraphSurface bumpy_surface(const GridPtr& g, unsigned seed) {
  SphereField f = random_field(g, seed);
  SphereField r(g);
  for (int i = 0; i < f.size(); ++i) r.v[i] = 3.0 + f.v[i];
  return GraphSurface(g, r);
}

void BM_analysis_full2d(benchmark::State& state) {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, static_cast<int>(state.range(0)));
  SphereField f = random_field(g, 7u);
  for (auto _ : state) benchmark::DoNotOptimize(analysis(f));
}
BENCHMARK(BM_analysis_full2d)->Arg(32)->Arg(64);

void BM_synthesis_jet_full2d(benchmark::State& state) {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, static_cast<int>(state.range(0)));
  HarmonicCoeffs c = analysis(random_field(g, 7u));
  for (auto _ : state) benchmark::DoNotOptimize(synthesis(c, 3));
}
BENCHMARK(BM_synthesis_jet_full2d)->Arg(32)->Arg(64);

void BM_geometry_report_full2d(benchmark::State& state) {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, static_cast<int>(state.range(0)));
  GraphSurface s = bumpy_surface(g, 11u);
  for (auto _ : state) benchmark::DoNotOptimize(geometry_report(s));
}
BENCHMARK(BM_geometry_report_full2d)->Arg(32)->Arg(64);

void BM_geometry_report_polar_n4(benchmark::State& state) {
  const GridPtr g = SphereGrid::create(4, GridMode::Polar, static_cast<int>(state.range(0)));
  GraphSurface s = bumpy_surface(g, 13u);
  for (auto _ : state) benchmark::DoNotOptimize(geometry_report(s));
}
BENCHMARK(BM_geometry_report_polar_n4)->Arg(170);

void BM_flow_step_full2d(benchmark::State& state) {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, static_cast<int>(state.range(0)));
  FlowState st = make_state(0.0, bumpy_surface(g, 17u));
  FlowControls controls;
  const double dt = std::min(controls.dt_max, stable_dt(st, controls));
  for (auto _ : state) benchmark::DoNotOptimize(step(st, dt, controls));
}
BENCHMARK(BM_flow_step_full2d)->Arg(32)->Arg(64);

void BM_limit_functional(benchmark::State& state) {
  const GridPtr g = SphereGrid::create(3, GridMode::Full2D, static_cast<int>(state.range(0)));
  SphereField f = random_field(g, 19u);
  for (auto _ : state) benchmark::DoNotOptimize(limit_functional(f));
}
BENCHMARK(BM_limit_functional)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
