#include "specdim/kernels.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>

#include "specdim/errors.hpp"
#include "specdim/measure.hpp"

#ifdef _OPENMP
#include <omp.h>
#else
static int omp_get_max_threads() { return 1; }
static int omp_get_thread_num() { return 0; }
#endif

namespace specdim::kernels {

namespace {
constexpr std::int64_t kChunk = 1024;

bool power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }
}  // namespace

void synthesize_serial(std::span<const SpectralComponent> comps,
                       std::span<std::complex<double>> out) {
  for (std::size_t t = 0; t < out.size(); ++t) {
    std::complex<double> acc{0.0, 0.0};
    for (const auto& c : comps)
      acc += std::polar(c.amplitude, c.omega * static_cast<double>(t) + c.phase);
    out[t] = acc;
  }
}

void synthesize_parallel(std::span<const SpectralComponent> comps,
                         std::span<std::complex<double>> out) {
  const std::int64_t n = static_cast<std::int64_t>(out.size());
  const std::int64_t nchunks = (n + kChunk - 1) / kChunk;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t t0 = c * kChunk;
    const std::int64_t t1 = std::min(n, t0 + kChunk);
    std::vector<std::complex<double>> ph(comps.size()), step(comps.size());
    for (std::size_t j = 0; j < comps.size(); ++j) {
      ph[j] = std::polar(comps[j].amplitude,
                         comps[j].omega * static_cast<double>(t0) + comps[j].phase);
      step[j] = std::polar(1.0, comps[j].omega);
    }
    for (std::int64_t t = t0; t < t1; ++t) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t j = 0; j < comps.size(); ++j) {
        acc += ph[j];
        ph[j] *= step[j];
      }
      out[static_cast<std::size_t>(t)] = acc;
    }
  }
}

void autocorrelation_serial(std::span<const std::complex<double>> x,
                            std::span<std::complex<double>> r) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(r.size()); ++t) {
    std::complex<double> acc{0.0, 0.0};
    for (std::int64_t s = 0; s + t < n; ++s)
      acc += x[static_cast<std::size_t>(s + t)] * std::conj(x[static_cast<std::size_t>(s)]);
    r[static_cast<std::size_t>(t)] = acc / static_cast<double>(n);
  }
}

void autocorrelation_parallel(std::span<const std::complex<double>> x,
                              std::span<std::complex<double>> r) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
  const std::int64_t lags = static_cast<std::int64_t>(r.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < lags; ++t) {
    std::complex<double> acc{0.0, 0.0};
    for (std::int64_t s = 0; s + t < n; ++s)
      acc += x[static_cast<std::size_t>(s + t)] * std::conj(x[static_cast<std::size_t>(s)]);
    r[static_cast<std::size_t>(t)] = acc / static_cast<double>(n);
  }
}

std::vector<std::complex<double>> fourier_sweep_serial(const SpectralMeasure& m,
                                                       std::int64_t count) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(count));
  for (std::int64_t t = 0; t < count; ++t) out[static_cast<std::size_t>(t)] = m.fourier(t);
  return out;
}

std::vector<std::complex<double>> fourier_sweep_parallel(const SpectralMeasure& m,
                                                         std::int64_t count) {
  std::vector<std::complex<double>> out(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t t = 0; t < count; ++t) out[static_cast<std::size_t>(t)] = m.fourier(t);
  return out;
}

std::vector<double> mean_power_spectrum_serial(std::span<const double> q,
                                               std::int64_t T) {
  const std::int64_t M = static_cast<std::int64_t>(q.size());
  if (!power_of_two(M)) throw InputError("mean power spectrum: grid must be a power of two");
  if (T < 1) throw InputError("mean power spectrum: T must be positive");
  std::vector<std::complex<double>> in(q.size()), sp(q.size());
  fftw_plan plan = fftw_plan_dft_1d(
      static_cast<int>(M), reinterpret_cast<fftw_complex*>(in.data()),
      reinterpret_cast<fftw_complex*>(sp.data()), FFTW_FORWARD,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  std::vector<double> out(q.size(), 0.0);
  for (std::int64_t s = 0; s < T; ++s) {
    for (std::size_t k = 0; k < q.size(); ++k)
      in[k] = std::polar(1.0, static_cast<double>(s) * q[k]);
    fftw_execute(plan);
    for (std::size_t k = 0; k < q.size(); ++k) out[k] += std::norm(sp[k]);
  }
  fftw_destroy_plan(plan);
  const double scale =
      1.0 / (static_cast<double>(T) * static_cast<double>(M) * static_cast<double>(M));
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> mean_power_spectrum_parallel(std::span<const double> q,
                                                 std::int64_t T) {
  const std::int64_t M = static_cast<std::int64_t>(q.size());
  if (!power_of_two(M)) throw InputError("mean power spectrum: grid must be a power of two");
  if (T < 1) throw InputError("mean power spectrum: T must be positive");
  std::vector<std::complex<double>> tmpl_in(q.size()), tmpl_out(q.size());
  fftw_plan plan = fftw_plan_dft_1d(
      static_cast<int>(M), reinterpret_cast<fftw_complex*>(tmpl_in.data()),
      reinterpret_cast<fftw_complex*>(tmpl_out.data()), FFTW_FORWARD,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  const int nthreads = omp_get_max_threads();
  std::vector<std::vector<double>> partial(
      static_cast<std::size_t>(nthreads), std::vector<double>(q.size(), 0.0));
#pragma omp parallel
  {
    auto& acc = partial[static_cast<std::size_t>(omp_get_thread_num())];
    std::vector<std::complex<double>> in(q.size()), sp(q.size());
#pragma omp for schedule(static)
    for (std::int64_t s = 0; s < T; ++s) {
      for (std::size_t k = 0; k < q.size(); ++k)
        in[k] = std::polar(1.0, static_cast<double>(s) * q[k]);
      fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                       reinterpret_cast<fftw_complex*>(sp.data()));
      for (std::size_t k = 0; k < q.size(); ++k) acc[k] += std::norm(sp[k]);
    }
  }
  fftw_destroy_plan(plan);
  std::vector<double> out(q.size(), 0.0);
  for (const auto& acc : partial)
    for (std::size_t k = 0; k < q.size(); ++k) out[k] += acc[k];
  const double scale =
      1.0 / (static_cast<double>(T) * static_cast<double>(M) * static_cast<double>(M));
  for (double& v : out) v *= scale;
  return out;
}

}  // namespace specdim::kernels
