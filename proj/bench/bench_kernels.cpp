// Serial vs parallel kernel comparison. Run with --benchmark_filter=... to
// narrow; not wired into ctest.

#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "specdim/kernels.hpp"
#include "specdim/measure.hpp"

namespace {

using namespace specdim;

std::vector<kernels::SpectralComponent> make_components(std::size_t count) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<kernels::SpectralComponent> comps(count);
  for (auto& c : comps) {
    c.omega = kTwoPi * unit(gen);
    c.amplitude = unit(gen) / static_cast<double>(count);
    c.phase = kTwoPi * unit(gen);
  }
  return comps;
}

std::vector<std::complex<double>> make_series(std::size_t length) {
  auto comps = make_components(64);
  std::vector<std::complex<double>> x(length);
  kernels::synthesize_serial(comps, x);
  return x;
}

void bm_synthesize_serial(benchmark::State& state) {
  const auto comps = make_components(256);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::synthesize_serial(comps, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(bm_synthesize_serial)->Arg(1 << 12)->Arg(1 << 14);

void bm_synthesize_parallel(benchmark::State& state) {
  const auto comps = make_components(256);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    kernels::synthesize_parallel(comps, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(bm_synthesize_parallel)->Arg(1 << 12)->Arg(1 << 14);

void bm_autocorrelation_serial(benchmark::State& state) {
  const auto x = make_series(static_cast<std::size_t>(state.range(0)));
  std::vector<std::complex<double>> r(x.size() / 4);
  for (auto _ : state) {
    kernels::autocorrelation_serial(x, r);
    benchmark::DoNotOptimize(r.data());
  }
}
BENCHMARK(bm_autocorrelation_serial)->Arg(1 << 12)->Arg(1 << 14);

void bm_autocorrelation_parallel(benchmark::State& state) {
  const auto x = make_series(static_cast<std::size_t>(state.range(0)));
  std::vector<std::complex<double>> r(x.size() / 4);
  for (auto _ : state) {
    kernels::autocorrelation_parallel(x, r);
    benchmark::DoNotOptimize(r.data());
  }
}
BENCHMARK(bm_autocorrelation_parallel)->Arg(1 << 12)->Arg(1 << 14);

void bm_fourier_sweep_serial(benchmark::State& state) {
  const auto m = SpectralMeasure::cantor();
  for (auto _ : state) {
    auto v = kernels::fourier_sweep_serial(m, state.range(0));
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(bm_fourier_sweep_serial)->Arg(256)->Arg(1024);

void bm_fourier_sweep_parallel(benchmark::State& state) {
  const auto m = SpectralMeasure::cantor();
  for (auto _ : state) {
    auto v = kernels::fourier_sweep_parallel(m, state.range(0));
    benchmark::DoNotOptimize(v.data());
  }
}
BENCHMARK(bm_fourier_sweep_parallel)->Arg(256)->Arg(1024);

void bm_mean_power_serial(benchmark::State& state) {
  const auto m = SpectralMeasure::cantor();
  const std::int64_t T = state.range(0);
  std::vector<double> q(static_cast<std::size_t>(4 * T));
  for (std::size_t k = 0; k < q.size(); ++k)
    q[k] = m.quantile((static_cast<double>(k) + 0.5) / static_cast<double>(q.size()));
  for (auto _ : state) {
    auto p = kernels::mean_power_spectrum_serial(q, T);
    benchmark::DoNotOptimize(p.data());
  }
}
BENCHMARK(bm_mean_power_serial)->Arg(256)->Arg(1024);

void bm_mean_power_parallel(benchmark::State& state) {
  const auto m = SpectralMeasure::cantor();
  const std::int64_t T = state.range(0);
  std::vector<double> q(static_cast<std::size_t>(4 * T));
  for (std::size_t k = 0; k < q.size(); ++k)
    q[k] = m.quantile((static_cast<double>(k) + 0.5) / static_cast<double>(q.size()));
  for (auto _ : state) {
    auto p = kernels::mean_power_spectrum_parallel(q, T);
    benchmark::DoNotOptimize(p.data());
  }
}
BENCHMARK(bm_mean_power_parallel)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
