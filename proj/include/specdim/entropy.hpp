#pragma once

// Entropy of the time-averaged state built from a spectral measure. Two
// routes: eigenvalues of the T x T Gram (Toeplitz) matrix of autocorrelations,
// and the Shannon entropy of the occupation distribution over the adapted
// oscillating basis indexed by integer labels n. Both are bounded by ln T.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "specdim/measure.hpp"

namespace specdim {

inline constexpr std::int64_t kDefaultToeplitzCap = 4096;

struct DensityMatrixSpectrum {
  std::int64_t T = 1;
  std::vector<double> eigenvalues;  // descending, clamped to [0, 1], sum ~ 1
};

struct BasisDistribution {
  std::int64_t T = 1;
  std::int64_t n_max = 0;     // window of labels -n_max..n_max
  std::vector<double> probs;  // size 2*n_max+1, label n stored at [n + n_max]
  double leak = 0.0;          // occupation escaping the window

  double prob(std::int64_t n) const;
};

struct EntropyCurve {
  std::vector<std::pair<std::int64_t, double>> points;  // (T, S(T))
  std::pair<std::int64_t, std::int64_t> fit_window{0, 0};  // [T_lo, T_hi] fitted
  double slope = 0.0;      // against ln T
  double intercept = 0.0;
  double residual = 0.0;   // rms over the fitted points
};

enum class EntropyMethod { eig, bf };

// Hermitian Toeplitz autocorrelation matrix R[s][t] = mu_hat(t - s), 0-based,
// size T x T. Throws ResourceError for T beyond the cap.
Eigen::MatrixXcd toeplitz(const SpectralMeasure& m, std::int64_t T,
                          std::int64_t cap = kDefaultToeplitzCap);

// Ascending eigenvalues of a Hermitian matrix.
std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& a);

// Entropy via dense eigendecomposition of toeplitz(m, T); eigenvalues are
// divided by T, clamped into [0, 1], and fed through theta.
std::pair<DensityMatrixSpectrum, double> eigen_entropy_toeplitz(
    const SpectralMeasure& m, std::int64_t T, std::int64_t cap = kDefaultToeplitzCap);

// Same values, but pure point measures take a closed-form d x d route (the
// frame matrix sqrt(w_j w_k) * D_T(lambda_j - lambda_k) shares the nonzero
// spectrum of the T x T matrix), which makes long-time scans cheap.
std::pair<DensityMatrixSpectrum, double> eigen_entropy(
    const SpectralMeasure& m, std::int64_t T, std::int64_t cap = kDefaultToeplitzCap);

// Occupation probabilities p_n(T) over the adapted basis, computed on a
// midpoint quantile grid of the given power-of-two size (grid >= 4*max(T, n_max)).
// Atomless measures only.
BasisDistribution bf_distribution(const SpectralMeasure& m, std::int64_t T,
                                  std::int64_t n_max, std::int64_t grid);

double shannon_entropy(const BasisDistribution& d);

// Spectral weight sum_j sin^2(pi * n * mass_j) / (pi * n)^2 over the greedy
// minimal set of N-partition cells holding more than keep_mass of the measure.
double w_quantity(const SpectralMeasure& m, std::int64_t n, std::int64_t N,
                  double keep_mass);

// Smallest window half-width nu with sum_{|n| <= nu} p_n > 1 - eps^2.
// Throws InputError when even the full window falls short.
std::int64_t n_epsilon(const BasisDistribution& d, double eps);

// Smallest count of top eigenvalues holding mass > 1 - eps.
std::int64_t m_epsilon(const DensityMatrixSpectrum& s, double eps);

struct LowerBoundCheck {
  double bound = 0.0;  // -inf when vacuous
  bool holds = true;
  bool vacuous = false;
};

// S >= eps*ln(1/eps) + eps*ln(m_eps - 3), meaningful only for m_eps > 3.
LowerBoundCheck lwb_bound(double entropy, std::int64_t m_eps, double eps);

// sum_n |n|^q p_n over the window.
double moment(const BasisDistribution& d, double q);

struct EntropyCurveOptions {
  std::int64_t toeplitz_cap = kDefaultToeplitzCap;
  double fit_fraction = 0.5;         // top fraction of times used in the fit
  std::int64_t bf_n_max_factor = 2;  // n_max = factor * T for the bf method
};

EntropyCurve entropy_curve(const SpectralMeasure& m,
                           const std::vector<std::int64_t>& times,
                           EntropyMethod method, const EntropyCurveOptions& opts = {});

// Fit S against ln T over the top fit_fraction of the (sorted) points.
EntropyCurve fit_entropy_curve(std::vector<std::pair<std::int64_t, double>> points,
                               double fit_fraction = 0.5);

}  // namespace specdim
