#include <benchmark/benchmark.h>

#include <memory>

#include "zkdamp/damping.hpp"
#include "zkdamp/dynamics.hpp"
#include "zkdamp/experiments.hpp"
#include "zkdamp/functionals.hpp"
#include "zkdamp/initial_data.hpp"
#include "zkdamp/spectral.hpp"

namespace {

using namespace zkdamp;

GridSpec grid_for(const benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  return default_grid(dim);
}

void BM_Transform(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  const RealField u = gaussian(g, 1.0, 1.0);
  const auto engine = FourierEngine::for_grid(g);
  SpectralField U(g), scratch(g);
  RealField back(g);
  for (auto _ : state) {
    engine->forward(u, U);
    engine->backward(U, back, scratch);
    benchmark::DoNotOptimize(back[0]);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

void BM_Step(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  auto profile = std::make_shared<const DampingProfile>(make_localized_damping(g, 0.5, 4.0, 1.0, 0.5));
  Stepper stepper(profile, 5e-3, Scheme::lawson_rk4, true, true);
  SpectralField U = transform(gaussian(g, 1.0, 1.0));
  stepper.project(U);
  double t = 0.0;
  for (auto _ : state) {
    stepper.advance(U, t);
    t += stepper.dt();
    benchmark::DoNotOptimize(U[0]);
  }
}

void BM_Record(benchmark::State& state) {
  const GridSpec g = grid_for(state);
  const DampingProfile profile = make_localized_damping(g, 0.5, 4.0, 1.0, 0.5);
  const Recorder recorder(profile);
  const SpectralField U = transform(gaussian(g, 1.0, 1.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(recorder(0.0, U).E);
  }
}

}  // namespace

BENCHMARK(BM_Transform)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Step)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Record)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
