#pragma once

// Stationary-series front end: synthesize a series whose spectral content
// follows a given measure, estimate its autocorrelation, and recover the
// entropy-growth exponent from data alone.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "specdim/entropy.hpp"
#include "specdim/measure.hpp"

namespace specdim {

struct StationarySeries {
  std::vector<std::complex<double>> values;
  std::string origin;  // synthetic(...) or ingested(path)
};

// Random-phase synthesis X_t = sum_j sqrt(mass_j) exp(i(omega_j t + phi_j)):
// atoms of the measure enter exactly, continuous parts through the midpoints
// of a depth-`depth` refinement in the measure's natural base. Deterministic
// for fixed (seed, depth): phases never depend on the thread count.
StationarySeries synthesize(const SpectralMeasure& m, std::int64_t length, int depth,
                            std::uint64_t seed,
                            std::uint64_t max_cells = kDefaultCellBudget);

struct AutocorrelationEstimate {
  std::vector<std::complex<double>> values;  // lags 0..maxlag, values[0] == 1
  std::complex<double> at(std::int64_t t) const;  // Hermitian in the lag
};

// Biased estimator normalized to lag 0; biased weighting keeps every Toeplitz
// matrix built from it positive semidefinite up to rounding. Requires
// maxlag < length / 4.
AutocorrelationEstimate estimate_autocorrelation(const StationarySeries& s,
                                                 std::int64_t maxlag);

// Entropy curve of the data-driven state: for each T, eigenvalues of the
// T x T Toeplitz matrix of estimated autocorrelations, clamped and divided
// by T. The slope against ln T estimates the spectral dimension of the data.
EntropyCurve spectrum_dimension(const StationarySeries& s,
                                const std::vector<std::int64_t>& times,
                                double fit_fraction = 0.5);

// CSV form: header "re,im", one sample per line. Parse errors carry the
// 1-based line number.
StationarySeries read_series_csv(const std::string& path);
void write_series_csv(const StationarySeries& s, std::ostream& out);

}  // namespace specdim
