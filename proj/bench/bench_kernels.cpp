// Serial reference kernels against their OpenMP versions. Set OMP_NUM_THREADS
// to compare thread counts; the Arg is the problem size.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "qns/kernels.hpp"

using namespace qns::kernels;

namespace {

struct Drive {
  std::vector<double> edges, amplitude, theta, omega;
  SegmentView view() const { return {edges, amplitude, theta}; }
};

Drive make_drive(std::size_t segments, std::size_t points) {
  std::mt19937_64 g(1);
  std::normal_distribution<double> n(0.0, 200.0);
  Drive d;
  const double dt = 5e-6;
  d.theta.push_back(0.0);
  for (std::size_t j = 0; j <= segments; ++j) d.edges.push_back(j * dt);
  for (std::size_t j = 0; j < segments; ++j) {
    d.amplitude.push_back(n(g));
    d.theta.push_back(d.theta.back() + d.amplitude.back() * dt);
  }
  for (std::size_t i = 0; i < points; ++i) d.omega.push_back(i * 3.1415926 / dt / points);
  return d;
}

template <FundamentalValues (*F)(const SegmentView&, std::span<const double>)>
void fundamental(benchmark::State& state) {
  const Drive d = make_drive(static_cast<std::size_t>(state.range(0)), 2048);
  for (auto _ : state) benchmark::DoNotOptimize(F(d.view(), d.omega));
  state.SetItemsProcessed(state.iterations() * state.range(0) * 2048);
}

template <double (*F)(std::span<const double>, std::span<const double>)>
void toeplitz(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> v(n), r(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = std::sin(0.01 * i);
    r[i] = std::exp(-1e-3 * i);
  }
  for (auto _ : state) benchmark::DoNotOptimize(F(v, r));
}

template <void (*F)(std::span<const double>, std::span<const double>, std::span<const double>, double, double,
                    std::span<double>)>
void cosines(benchmark::State& state) {
  const std::size_t tones = 512;
  std::vector<double> amp(tones, 1.0), freq(tones), phase(tones);
  for (std::size_t i = 0; i < tones; ++i) {
    freq[i] = 100.0 * i;
    phase[i] = 0.1 * i;
  }
  std::vector<double> out(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    F(amp, freq, phase, 0.0, 1e-6, out);
    benchmark::ClobberMemory();
  }
}

}  // namespace

BENCHMARK(fundamental<fundamental_ffs_serial>)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(fundamental<fundamental_ffs_parallel>)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(toeplitz<toeplitz_quadratic_serial>)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(toeplitz<toeplitz_quadratic_parallel>)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);
BENCHMARK(cosines<cosine_sum_serial>)->Arg(4096)->Arg(32768)->Unit(benchmark::kMillisecond);
BENCHMARK(cosines<cosine_sum_parallel>)->Arg(4096)->Arg(32768)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
