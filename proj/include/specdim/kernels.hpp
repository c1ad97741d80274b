#pragma once

// Data-parallel inner loops, each in a plain serial form and an OpenMP form.
// The serial versions are the reference the tests compare against; the
// library calls the parallel versions. The parallel synthesis walks fixed
// 1024-step chunks, so its output does not depend on the thread count.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace specdim {
class SpectralMeasure;
}

namespace specdim::kernels {

struct SpectralComponent {
  double omega;      // angle advanced per time step
  double amplitude;  // sqrt of the spectral mass carried
  double phase;
};

// out[t] = sum_j amplitude_j * exp(i * (omega_j * t + phase_j))
void synthesize_serial(std::span<const SpectralComponent> comps,
                       std::span<std::complex<double>> out);
void synthesize_parallel(std::span<const SpectralComponent> comps,
                         std::span<std::complex<double>> out);

// Biased estimate r[t] = (1/n) sum_{s=0}^{n-1-t} x[s+t] * conj(x[s]).
void autocorrelation_serial(std::span<const std::complex<double>> x,
                            std::span<std::complex<double>> r);
void autocorrelation_parallel(std::span<const std::complex<double>> x,
                              std::span<std::complex<double>> r);

// mu_hat(t) for t = 0..count-1.
std::vector<std::complex<double>> fourier_sweep_serial(const SpectralMeasure& m,
                                                       std::int64_t count);
std::vector<std::complex<double>> fourier_sweep_parallel(const SpectralMeasure& m,
                                                         std::int64_t count);

// Time-averaged power spectrum of phase snapshots over a quantile grid:
// out[f] = (1/T) sum_{s<T} |FFT_M(exp(i*s*q))[f] / M|^2 with M = q.size(),
// a power of two.
std::vector<double> mean_power_spectrum_serial(std::span<const double> q,
                                               std::int64_t T);
std::vector<double> mean_power_spectrum_parallel(std::span<const double> q,
                                                 std::int64_t T);

}  // namespace specdim::kernels
