#pragma once

// Dimension estimators read off three different scaling laws of a measure:
// the entropy of partition cell masses (information), the growth of minimal
// high-mass covers (box/fractal), and quantiles of local scaling exponents at
// sampled points (a Hausdorff-style estimate from below).

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "specdim/measure.hpp"

namespace specdim {

enum class DimensionKind { info, fractal, pointwise };

struct DimensionEstimate {
  DimensionKind kind = DimensionKind::info;
  double value = 0.0;      // clamped to [0, 1]
  double value_low = 0.0;  // pointwise: lower quantile; otherwise equals value
  std::pair<int, int> depths{0, 0};
  // (depth, partition entropy) / (depth, ln cover count) / (scale, mean alpha)
  std::vector<std::pair<double, double>> per_depth;
  double residual = 0.0;
};

// Slope of sum theta(mass) over cells against depth * ln(base).
DimensionEstimate information_dimension(const SpectralMeasure& m, int base,
                                        int depth_lo, int depth_hi,
                                        std::uint64_t max_cells = kDefaultCellBudget);

// Slope of ln(minimal number of highest-mass cells covering more than
// 1 - eps of the measure) against depth * ln(base).
DimensionEstimate fractal_dimension(const SpectralMeasure& m, double eps, int base,
                                    int depth_lo, int depth_hi,
                                    std::uint64_t max_cells = kDefaultCellBudget);

// Local scaling exponents alpha_delta(lambda) =
// log mu((lambda-delta, lambda+delta)) / log(delta/pi), one per scale, using
// interval length normalized by the full circle. +inf where the interval
// carries no mass.
std::vector<std::pair<double, double>> pointwise_alpha(const SpectralMeasure& m,
                                                       double lambda,
                                                       std::span<const double> deltas);

struct HausdorffOptions {
  double q_low = 0.05;
  double q_high = 0.95;
};

// Per sampled point, the minimum of alpha_delta over the scales; `value` is
// the upper quantile of those minima (dimension estimate), `value_low` the
// lower quantile.
DimensionEstimate hausdorff_estimate(const SpectralMeasure& m, std::uint64_t seed,
                                     std::size_t samples, std::span<const double> deltas,
                                     const HausdorffOptions& opts = {});

// Scales pi * 2^{-k!} for k = 2..k_max (k_max <= 5 before underflow
// territory): intervals exactly one depth-k! cell wide, the natural ruler
// for the factorial-block measure.
std::vector<double> factorial_scales(int k_max);

// Scales pi * base^{-j} for j = j_lo..j_hi (intervals one depth-j cell wide).
std::vector<double> geometric_scales(int base, int j_lo, int j_hi);

}  // namespace specdim
