// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to the
// core count; on one core the pairs should be within noise of each other.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "gasdiff/binning.hpp"
#include "gasdiff/fdsolver.hpp"
#include "gasdiff/md.hpp"

using namespace gasdiff;

namespace {

ParticleState state_for(int n_per_species) {
  MDConfig cfg;
  cfg.n_he = n_per_species;
  cfg.n_ar = n_per_species;
  return init_state(cfg, SimBox(5e3 * std::sqrt(n_per_species / 500.0)));
}

void BM_ForcesSerial(benchmark::State& st) {
  const auto s = state_for(static_cast<int>(st.range(0)));
  const SimBox box(5e3 * std::sqrt(st.range(0) / 500.0));
  for (auto _ : st) benchmark::DoNotOptimize(compute_forces_serial(s, box));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(s.size()));
}

void BM_ForcesOmp(benchmark::State& st) {
  const auto s = state_for(static_cast<int>(st.range(0)));
  const SimBox box(5e3 * std::sqrt(st.range(0) / 500.0));
  for (auto _ : st) benchmark::DoNotOptimize(compute_forces(s, box));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(s.size()));
}

ScalarField random_field(int n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  ScalarField f(GridSpec(2, n));
  for (auto& v : f.values()) v = u(rng);
  return f;
}

void BM_LaplacianSerial(benchmark::State& st) {
  const auto f = random_field(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(apply_discrete_laplacian_serial(f));
}

void BM_LaplacianOmp(benchmark::State& st) {
  const auto f = random_field(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(apply_discrete_laplacian(f));
}

Trajectory binning_input() {
  MDConfig cfg;
  cfg.n_he = 2000;
  cfg.n_ar = 2000;
  cfg.sample_stride = 1;
  return run(cfg, SimBox(1e4), 20).trajectory;
}

void BM_BinningSerial(benchmark::State& st) {
  static const Trajectory t = binning_input();
  const GridSpec g(2, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(bin_trajectory_serial(t, Species::Ar, g));
}

void BM_BinningOmp(benchmark::State& st) {
  static const Trajectory t = binning_input();
  const GridSpec g(2, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(bin_trajectory(t, Species::Ar, g));
}

}  // namespace

BENCHMARK(BM_ForcesSerial)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForcesOmp)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LaplacianSerial)->Arg(128)->Arg(512);
BENCHMARK(BM_LaplacianOmp)->Arg(128)->Arg(512);
BENCHMARK(BM_BinningSerial)->Arg(20)->Arg(100);
BENCHMARK(BM_BinningOmp)->Arg(20)->Arg(100);

BENCHMARK_MAIN();
