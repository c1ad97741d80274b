#include "specdim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <vector>

#include "specdim/errors.hpp"
#include "specdim/fit.hpp"

namespace specdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = kTwoPi / 2.0;

double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Scales of the form pi * 2^-j sit far below double resolution once j is
// large (j = 120 for the deepest factorial scale), so for base-2 digit
// measures interval masses are evaluated in exact dyadic digit arithmetic.
// The interval (x-h, x+h) with h = 2^-(j+1) in unit coordinates is exactly
// one depth-j cell wide and meets at most two cells; each piece is a prefix
// or suffix of a cell, and digit independence makes the conditional mass of
// a prefix or suffix depend only on the positions below the cell.
using Bits = std::vector<std::uint8_t>;

// binary expansion of x in [0, 1); terminates because doubles are dyadic
Bits dyadic_digits(double x) {
  Bits d;
  while (x > 0.0 && d.size() < 1200) {
    x *= 2.0;
    if (x >= 1.0) {
      d.push_back(1);
      x -= 1.0;
    } else {
      d.push_back(0);
    }
  }
  return d;
}

bool bits_less(const Bits& a, const Bits& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool bits_zero(const Bits& a) {
  return std::all_of(a.begin(), a.end(), [](std::uint8_t v) { return v == 0; });
}

Bits bits_add(const Bits& a, const Bits& b) {
  Bits r(a.size());
  int carry = 0;
  for (std::size_t i = a.size(); i-- > 0;) {
    const int s = a[i] + b[i] + carry;
    r[i] = static_cast<std::uint8_t>(s & 1);
    carry = s >> 1;
  }
  return r;
}

// a - b for fractions with a >= b
Bits bits_sub(const Bits& a, const Bits& b) {
  Bits r(a.size());
  int borrow = 0;
  for (std::size_t i = a.size(); i-- > 0;) {
    int s = a[i] - b[i] - borrow;
    borrow = s < 0 ? 1 : 0;
    r[i] = static_cast<std::uint8_t>(s & 1);
  }
  return r;
}

// 1 - y for y in (0, 1): complement plus one ulp
Bits bits_one_minus(const Bits& y) {
  Bits r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] ? 0 : 1;
  for (std::size_t i = r.size(); i-- > 0;) {
    if (!r[i]) {
      r[i] = 1;
      break;
    }
    r[i] = 0;
  }
  return r;
}

// decrement the cell path as a binary integer; false when already zero
bool bits_dec(Bits& p) {
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i]) {
      p[i] = 0;
      return true;
    }
    p[i] = 1;
  }
  return false;
}

bool bits_inc(Bits& p) {
  for (std::size_t i = p.size(); i-- > 0;) {
    if (!p[i]) {
      p[i] = 1;
      return true;
    }
    p[i] = 0;
  }
  return false;
}

double digit_cell_log(const DigitProductMeasure& d, const Bits& path) {
  double lm = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double p = d.law.at(static_cast<int>(i) + 1)[path[i]];
    if (p == 0.0) return -kInf;
    lm += std::log(p);
  }
  return lm;
}

// log conditional mass of the first x of a depth-n cell, where
// x = sum xs[i] 2^-(i+1) relative to the cell; exact since xs is finite
double digit_prefix_log(const DigitProductMeasure& d, int n, const Bits& xs) {
  double acc = -kInf;
  double cur = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto& row = d.law.at(n + 1 + static_cast<int>(i));
    if (xs[i]) {
      if (row[0] > 0.0) acc = logaddexp(acc, cur + std::log(row[0]));
      cur = row[1] > 0.0 ? cur + std::log(row[1]) : -kInf;
    } else {
      cur = row[0] > 0.0 ? cur + std::log(row[0]) : -kInf;
    }
    if (cur == -kInf) break;
  }
  return acc;
}

// log conditional mass of the last x of a depth-n cell
double digit_suffix_log(const DigitProductMeasure& d, int n, const Bits& xs) {
  double acc = -kInf;
  double cur = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto& row = d.law.at(n + 1 + static_cast<int>(i));
    if (xs[i]) {
      if (row[1] > 0.0) acc = logaddexp(acc, cur + std::log(row[1]));
      cur = row[0] > 0.0 ? cur + std::log(row[0]) : -kInf;
    } else {
      cur = row[1] > 0.0 ? cur + std::log(row[1]) : -kInf;
    }
    if (cur == -kInf) break;
  }
  return acc;
}

// log mu((x - h, x + h)) for a base-2 digit measure, h = 2^-(j+1), x in unit
// coordinates; the interval is clipped to [0, 1], never wrapped
double digit_interval_log(const DigitProductMeasure& d, double x, int j) {
  const std::size_t n = static_cast<std::size_t>(j);
  if (x >= 1.0) {
    // only (1 - h, 1) remains: the last half of the all-ones cell
    const Bits path(n, 1);
    const double cell = digit_cell_log(d, path);
    if (cell == -kInf) return -kInf;
    return cell + digit_suffix_log(d, j, Bits{1});
  }
  Bits lam = dyadic_digits(x);
  if (lam.size() < n + 2) lam.resize(n + 2, 0);
  const Bits path(lam.begin(), lam.begin() + static_cast<std::ptrdiff_t>(n));
  const Bits frac(lam.begin() + static_cast<std::ptrdiff_t>(n), lam.end());
  Bits h(frac.size(), 0);
  h[0] = 1;
  const double own_cell = digit_cell_log(d, path);
  double total = -kInf;
  if (bits_less(frac, h)) {
    // reaches into the previous cell: [lo, x + h) plus the last h - frac of it
    if (own_cell != -kInf)
      total = logaddexp(total, own_cell + digit_prefix_log(d, j, bits_add(frac, h)));
    Bits prev = path;
    if (bits_dec(prev)) {
      const double prev_cell = digit_cell_log(d, prev);
      if (prev_cell != -kInf)
        total = logaddexp(total,
                          prev_cell + digit_suffix_log(d, j, bits_sub(h, frac)));
    }
  } else {
    const Bits y = bits_sub(frac, h);
    if (bits_zero(y)) return own_cell;  // the interval is exactly the cell
    // [x - h, hi) plus the first y of the next cell
    if (own_cell != -kInf)
      total = logaddexp(total,
                        own_cell + digit_suffix_log(d, j, bits_one_minus(y)));
    Bits next = path;
    if (bits_inc(next)) {
      const double next_cell = digit_cell_log(d, next);
      if (next_cell != -kInf)
        total = logaddexp(total, next_cell + digit_prefix_log(d, j, y));
    }
  }
  return total;
}

// j such that delta == pi * 2^-j exactly, or -1
int dyadic_scale_exponent(double delta) {
  const double j_real = -std::log2(delta / kPi);
  const double j_round = std::round(j_real);
  if (j_round >= 1.0 && j_round <= 1100.0 && std::abs(j_real - j_round) < 1e-9 &&
      delta == kPi * std::exp2(-j_round))
    return static_cast<int>(j_round);
  return -1;
}

void check_depth_range(int base, int depth_lo, int depth_hi) {
  if (base < 2) throw InputError("dimension: base must be at least 2");
  if (depth_lo < 1 || depth_hi < depth_lo + 1)
    throw InputError("dimension: need 1 <= depth_lo < depth_hi");
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

DimensionEstimate fit_depths(DimensionKind kind, int base, int depth_lo, int depth_hi,
                             std::vector<std::pair<double, double>> per_depth) {
  std::vector<double> xs, ys;
  xs.reserve(per_depth.size());
  ys.reserve(per_depth.size());
  for (const auto& [d, v] : per_depth) {
    xs.push_back(d * std::log(static_cast<double>(base)));
    ys.push_back(v);
  }
  const LineFit f = fit_line(xs, ys);
  DimensionEstimate e;
  e.kind = kind;
  e.value = clamp01(f.slope);
  e.value_low = e.value;
  e.depths = {depth_lo, depth_hi};
  e.per_depth = std::move(per_depth);
  e.residual = f.rms_residual;
  return e;
}

// run f(i) for i in [lo, hi) under OpenMP, funneling the first exception out
template <typename F>
void parallel_for(std::int64_t lo, std::int64_t hi, F&& f) {
  std::exception_ptr err = nullptr;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = lo; i < hi; ++i) {
    if (err) continue;
    try {
      f(i);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace

DimensionEstimate information_dimension(const SpectralMeasure& m, int base,
                                        int depth_lo, int depth_hi,
                                        std::uint64_t max_cells) {
  check_depth_range(base, depth_lo, depth_hi);
  std::vector<std::pair<double, double>> per_depth(
      static_cast<std::size_t>(depth_hi - depth_lo + 1));
  parallel_for(depth_lo, depth_hi + 1, [&](std::int64_t d) {
    const auto cells = m.refine(base, static_cast<int>(d), max_cells);
    double h = 0.0;
    for (const auto& c : cells) h += theta_log(c.log_mass);
    per_depth[static_cast<std::size_t>(d - depth_lo)] = {static_cast<double>(d), h};
  });
  return fit_depths(DimensionKind::info, base, depth_lo, depth_hi,
                    std::move(per_depth));
}

DimensionEstimate fractal_dimension(const SpectralMeasure& m, double eps, int base,
                                    int depth_lo, int depth_hi,
                                    std::uint64_t max_cells) {
  check_depth_range(base, depth_lo, depth_hi);
  if (!(eps > 0.0) || !(eps < 1.0))
    throw InputError("dimension: eps must lie in (0, 1)");
  std::vector<std::pair<double, double>> per_depth(
      static_cast<std::size_t>(depth_hi - depth_lo + 1));
  parallel_for(depth_lo, depth_hi + 1, [&](std::int64_t d) {
    auto cells = m.refine(base, static_cast<int>(d), max_cells);
    std::vector<double> masses;
    masses.reserve(cells.size());
    for (const auto& c : cells) masses.push_back(c.mass());
    std::sort(masses.begin(), masses.end(), std::greater<>());
    const double target = 1.0 - eps;
    double cum = 0.0;
    std::size_t count = 0;
    for (double v : masses) {
      cum += v;
      ++count;
      if (cum > target) break;
    }
    per_depth[static_cast<std::size_t>(d - depth_lo)] = {
        static_cast<double>(d), std::log(static_cast<double>(count))};
  });
  return fit_depths(DimensionKind::fractal, base, depth_lo, depth_hi,
                    std::move(per_depth));
}

// alpha at each scale for the point with unit coordinate x (lambda / 2*pi);
// the unit coordinate drives the exact dyadic path so samples drawn in unit
// coordinates keep their digit structure
static std::vector<std::pair<double, double>> alpha_row(
    const SpectralMeasure& m, double x, std::span<const double> deltas) {
  const double lambda = kTwoPi * x;
  const auto* digit = std::get_if<DigitProductMeasure>(&m.node());
  std::vector<std::pair<double, double>> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    if (!(delta > 0.0) || !(delta < kPi))
      throw InputError("local exponent: scales must lie in (0, pi)");
    double lm;
    double denom;
    const int j = digit != nullptr && digit->base == 2 ? dyadic_scale_exponent(delta) : -1;
    if (j > 0) {
      lm = digit_interval_log(*digit, x, j);
      denom = -static_cast<double>(j) * std::log(2.0);
    } else {
      if (lambda + delta == lambda || lambda - delta == lambda)
        throw InputError(
            "local exponent: scale below floating-point resolution at this "
            "point; base-2 digit measures support scales of the form pi*2^-j");
      lm = m.log_interval_mass(lambda - delta, lambda + delta);
      denom = std::log(delta / kPi);
    }
    // the ratio uses interval length relative to the full circle: 2d/2pi
    out.emplace_back(delta, lm == -kInf ? kInf : lm / denom);
  }
  return out;
}

std::vector<std::pair<double, double>> pointwise_alpha(const SpectralMeasure& m,
                                                       double lambda,
                                                       std::span<const double> deltas) {
  if (!(lambda >= 0.0) || lambda > kTwoPi)
    throw InputError("local exponent: lambda must lie in [0, 2*pi]");
  return alpha_row(m, lambda / kTwoPi, deltas);
}

DimensionEstimate hausdorff_estimate(const SpectralMeasure& m, std::uint64_t seed,
                                     std::size_t samples, std::span<const double> deltas,
                                     const HausdorffOptions& opts) {
  if (samples < 100) throw InputError("dimension: need at least 100 sample points");
  if (deltas.empty()) throw InputError("dimension: need at least one scale");
  if (!(opts.q_low >= 0.0) || !(opts.q_low < opts.q_high) || !(opts.q_high <= 1.0))
    throw InputError("dimension: quantiles must satisfy 0 <= q_low < q_high <= 1");
  for (double delta : deltas)
    if (!(delta > 0.0) || !(delta < kPi))
      throw InputError("local exponent: scales must lie in (0, pi)");
  const auto points = m.sample_unit(seed, samples);
  std::vector<double> alpha(samples * deltas.size());
  parallel_for(0, static_cast<std::int64_t>(samples), [&](std::int64_t i) {
    const auto a = alpha_row(m, points[static_cast<std::size_t>(i)], deltas);
    for (std::size_t j = 0; j < deltas.size(); ++j)
      alpha[static_cast<std::size_t>(i) * deltas.size() + j] = a[j].second;
  });
  std::vector<double> minima(samples, kInf);
  std::vector<double> scale_sum(deltas.size(), 0.0);
  std::vector<std::int64_t> scale_count(deltas.size(), 0);
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      const double a = alpha[i * deltas.size() + j];
      if (a == kInf) continue;
      minima[i] = std::min(minima[i], a);
      scale_sum[j] += a;
      scale_count[j] += 1;
    }
  }
  std::vector<double> finite;
  finite.reserve(samples);
  for (double v : minima)
    if (v != kInf) finite.push_back(v);
  if (finite.size() < 2)
    throw InputError("dimension: too few points with positive interval mass");
  std::sort(finite.begin(), finite.end());
  auto quantile_at = [&](double q) {
    const double pos = q * static_cast<double>(finite.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const std::size_t j = std::min(finite.size() - 1, i + 1);
    const double frac = pos - static_cast<double>(i);
    return finite[i] * (1.0 - frac) + finite[j] * frac;
  };
  DimensionEstimate e;
  e.kind = DimensionKind::pointwise;
  e.value = clamp01(quantile_at(opts.q_high));
  e.value_low = clamp01(quantile_at(opts.q_low));
  e.depths = {0, static_cast<int>(deltas.size()) - 1};
  for (std::size_t j = 0; j < deltas.size(); ++j) {
    const double mean = scale_count[j] > 0
                            ? scale_sum[j] / static_cast<double>(scale_count[j])
                            : kInf;
    e.per_depth.emplace_back(deltas[j], mean);
  }
  double mean = 0.0;
  for (double v : finite) mean += v;
  mean /= static_cast<double>(finite.size());
  double var = 0.0;
  for (double v : finite) var += (v - mean) * (v - mean);
  e.residual = std::sqrt(var / static_cast<double>(finite.size()));
  return e;
}

std::vector<double> factorial_scales(int k_max) {
  if (k_max < 2 || k_max > 5)
    throw InputError("scales: factorial depths are supported for k in [2, 5]");
  std::vector<double> out;
  std::int64_t fact = 2;  // k!
  for (int k = 2; k <= k_max; ++k) {
    out.push_back(kPi * std::exp2(-static_cast<double>(fact)));
    fact *= (k + 1);
  }
  return out;
}

std::vector<double> geometric_scales(int base, int j_lo, int j_hi) {
  if (base < 2 || j_lo < 1 || j_hi < j_lo)
    throw InputError("scales: need base >= 2 and 1 <= j_lo <= j_hi");
  std::vector<double> out;
  for (int j = j_lo; j <= j_hi; ++j)
    out.push_back(kPi * std::pow(static_cast<double>(base), -j));
  return out;
}

}  // namespace specdim
