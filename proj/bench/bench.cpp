#include <benchmark/benchmark.h>

#include "swarmkin/master_oracle.hpp"
#include "swarmkin/particle_sim.hpp"

using namespace swarmkin;

namespace {

void ensemble_serial(benchmark::State& state) {
  const DynamicsConfig cfg(DynamicsKind::CL, static_cast<int>(state.range(0)), 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_marginals_serial(cfg, 32, 7, 64));
}

void ensemble_parallel(benchmark::State& state) {
  const DynamicsConfig cfg(DynamicsKind::CL, static_cast<int>(state.range(0)), 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(ensemble_marginals(cfg, 32, 7, 64));
}

MasterField bumpy(int n, int g) {
  MasterField f(n, g);
  for (std::size_t i = 0; i < f.field.size(); ++i) f.field.values[i] = 1.0 + 0.3 * std::sin(0.01 * static_cast<double>(i));
  f.symmetrize();
  f.normalize();
  return f;
}

template <DynamicsKind Kind, int N>
void master_serial(benchmark::State& state) {
  const int g = static_cast<int>(state.range(0));
  const auto op = make_master_operator(DynamicsConfig(Kind, N, 0.05), g);
  const auto f = bumpy(N, g);
  for (auto _ : state) benchmark::DoNotOptimize(apply_serial(op, f));
}

template <DynamicsKind Kind, int N>
void master_parallel(benchmark::State& state) {
  const int g = static_cast<int>(state.range(0));
  const auto op = make_master_operator(DynamicsConfig(Kind, N, 0.05), g);
  const auto f = bumpy(N, g);
  for (auto _ : state) benchmark::DoNotOptimize(apply(op, f));
}

}  // namespace

BENCHMARK(ensemble_serial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(ensemble_parallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(master_serial<DynamicsKind::CL, 2>)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(master_parallel<DynamicsKind::CL, 2>)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(master_serial<DynamicsKind::CL, 3>)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(master_parallel<DynamicsKind::CL, 3>)->Arg(24)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(master_serial<DynamicsKind::UnbiasedBDG, 2>)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(master_parallel<DynamicsKind::UnbiasedBDG, 2>)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
