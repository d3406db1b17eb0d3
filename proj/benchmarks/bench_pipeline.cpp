// Microbenchmarks for the dominant kernels: the extrapolation-filter solve,
// the smooth averaging weights, lattice reduction, and the Fourier fit.

#include <benchmark/benchmark.h>

#include <random>

#include "toruskit/dynamics.hpp"
#include "toruskit/fit.hpp"
#include "toruskit/lattice.hpp"
#include "toruskit/linalg.hpp"
#include "toruskit/spectral.hpp"

using namespace toruskit;
using dynamics::MapConfig;
using dynamics::MapKind;
using dynamics::ObservableSeries;
using dynamics::PhaseState;

namespace {

ObservableSeries quasiperiodic_series(Eigen::Index N) {
  MapConfig m;
  m.kind = MapKind::coupled_standard_map;
  m.K_sm << 0.1, 0.05, 0.05, 0.05;
  const PhaseState x0(Eigen::Vector2d(0.12, 0.34), Eigen::Vector2d(0.41, 0.23));
  return dynamics::generate_series(m, x0, N);
}

void bm_birkhoff_weights(benchmark::State& state) {
  const Eigen::Index T = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(spectral::birkhoff_weights(T));
}
BENCHMARK(bm_birkhoff_weights)->Arg(4000)->Arg(16000);

void bm_rre_filter(benchmark::State& state) {
  const Eigen::Index J = state.range(0), T = 2 * J;
  const ObservableSeries s = quasiperiodic_series(T + 2 * J + 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(spectral::solve_rre_filter(s, J, T));
}
BENCHMARK(bm_rre_filter)->Arg(100)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

void bm_kz_reduce(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 0.35);
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) += gauss(rng);
  lattice::AveragedMetric metric;
  metric.G = B.transpose() * B;
  for (auto _ : state) benchmark::DoNotOptimize(lattice::kz_reduce(metric));
}
BENCHMARK(bm_kz_reduce)->Arg(2)->Arg(3);

void bm_fourier_fit(benchmark::State& state) {
  const ObservableSeries s = quasiperiodic_series(1200);
  const Eigen::Vector2d omega(0.4131, 0.2314);
  torus::ResolutionBox box;
  const int K = static_cast<int>(state.range(0));
  box.K = Eigen::Vector2i(K, K);
  for (auto _ : state)
    benchmark::DoNotOptimize(fit::fourier_least_squares(s, omega, box, false, 1000));
}
BENCHMARK(bm_fourier_fit)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
