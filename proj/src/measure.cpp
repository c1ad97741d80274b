#include "specdim/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>

#include "specdim/errors.hpp"

namespace specdim {

namespace {

constexpr double kPi = kTwoPi / 2.0;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDescentCap = 4096;        // CDF/quantile structure descents
constexpr int kIntervalDepthCap = 3000;  // interval-mass edge chains
constexpr double kLogFloor = -1000.0;    // masses below e^-1000 report as zero
constexpr std::size_t kFourierMemoCap = std::size_t{1} << 22;

double logaddexp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b), lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// 53-bit uniform in [0, 1); identical output on every platform.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double next() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
};

void check_probabilities(const std::vector<double>& p, const char* what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || v > 1.0)
      throw InputError(std::string(what) + ": probabilities must lie in [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw InputError(std::string(what) + ": probabilities must sum to 1");
}

// ---------------------------------------------------------------------------
// mass strictly below x, unit coordinates: P(X < x)

double atomic_mass_below(const AtomicMeasure& a, double x) {
  double acc = 0.0;
  for (const auto& [pos, w] : a.atoms) {
    if (pos / kTwoPi < x) acc += w;
    else break;
  }
  return acc;
}

double atomic_atom_at(const AtomicMeasure& a, double x) {
  for (const auto& [pos, w] : a.atoms)
    if (pos / kTwoPi == x) return w;
  return 0.0;
}

double ifs_mass_below(const IfsMeasure& f, double x, double tol) {
  double acc = 0.0, w = 1.0;
  for (int guard = 0; guard < kDescentCap; ++guard) {
    if (x <= 0.0) return acc;
    if (x >= 1.0) return acc + w;
    bool descended = false;
    for (std::size_t m = 0; m < f.maps.size(); ++m) {
      const double o = f.maps[m].offset, s = f.maps[m].scale, p = f.probs[m];
      if (x >= o + s) {
        acc += w * p;  // image entirely below x
        continue;
      }
      if (x <= o) return acc;            // x sits in the gap before image m
      if (s == 1.0) return acc + w * x;  // Lebesgue piece
      x = (x - o) / s;
      w *= p;
      if (w <= tol) return acc + 0.5 * w;  // undecided sliver of mass <= w
      descended = true;
      break;
    }
    if (!descended) return acc;  // past the last image
  }
  return acc;
}

double digit_mass_below(const DigitProductMeasure& d, double x, double tol) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double acc = 0.0, q = 1.0, rest = x;
  for (std::int64_t n = 1; n <= kDescentCap; ++n) {
    rest *= d.base;
    int a = static_cast<int>(rest);
    if (a > d.base - 1) a = d.base - 1;
    rest -= a;
    const auto& law = d.law.at(n);
    for (int j = 0; j < a; ++j) acc += q * law[j];
    q *= law[a];
    if (q <= tol) return acc + 0.5 * q;
    if (rest == 0.0) return acc;  // x has a terminating expansion
  }
  return acc + 0.5 * q;
}

double digit_atom_at(const DigitProductMeasure& d, double x, double tol) {
  if (x < 0.0 || x > 1.0) return 0.0;
  if (x == 1.0) {  // single expansion: every digit equals base-1
    double q = 1.0;
    for (std::int64_t n = 1; n <= kDescentCap && q > tol; ++n) q *= d.law.at(n).back();
    return q <= tol ? 0.0 : q;
  }
  double q1 = 1.0, rest = x;
  std::int64_t terminal = -1;  // position after which all digits are 0
  std::vector<int> digits;
  for (std::int64_t n = 1; n <= kDescentCap && q1 > tol; ++n) {
    rest *= d.base;
    int a = static_cast<int>(rest);
    if (a > d.base - 1) a = d.base - 1;
    rest -= a;
    digits.push_back(a);
    q1 *= d.law.at(n)[a];
    if (rest == 0.0) {
      terminal = n;
      for (std::int64_t m = n + 1; m <= kDescentCap && q1 > tol; ++m)
        q1 *= d.law.at(m)[0];
      break;
    }
  }
  if (q1 <= tol) q1 = 0.0;
  if (terminal < 0 || x == 0.0) return q1;
  // mirror expansion: last nonzero digit decremented, then all base-1
  std::int64_t last = terminal;
  while (last > 0 && digits[static_cast<std::size_t>(last - 1)] == 0) --last;
  if (last == 0) return q1;
  double q2 = 1.0;
  for (std::int64_t n = 1; n < last && q2 > tol; ++n)
    q2 *= d.law.at(n)[digits[static_cast<std::size_t>(n - 1)]];
  q2 *= d.law.at(last)[digits[static_cast<std::size_t>(last - 1)] - 1];
  for (std::int64_t n = last + 1; n <= kDescentCap && q2 > tol; ++n)
    q2 *= d.law.at(n).back();
  if (q2 <= tol) q2 = 0.0;
  return q1 + q2;
}

double mass_below(const SpectralMeasure::Node& node, double x, double tol) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          return atomic_mass_below(n, x);
        } else if constexpr (std::is_same_v<T, IfsMeasure>) {
          return ifs_mass_below(n, x, tol);
        } else if constexpr (std::is_same_v<T, DigitProductMeasure>) {
          return digit_mass_below(n, x, tol);
        } else {
          return n.point_mass * atomic_mass_below(n.point_part, x) +
                 (1.0 - n.point_mass) * mass_below(n.continuous_part->node(), x, tol);
        }
      },
      node);
}

double atom_at(const SpectralMeasure::Node& node, double x, double tol) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          return atomic_atom_at(n, x);
        } else if constexpr (std::is_same_v<T, IfsMeasure>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, DigitProductMeasure>) {
          return digit_atom_at(n, x, tol);
        } else {
          return n.point_mass * atomic_atom_at(n.point_part, x) +
                 (1.0 - n.point_mass) * atom_at(n.continuous_part->node(), x, tol);
        }
      },
      node);
}

// ---------------------------------------------------------------------------
// log mu((lo, hi)) on the unit interval, open at both ends

double ifs_log_interval(const IfsMeasure& f, double lo, double hi, int depth,
                        double logq) {
  if (!(hi > lo) || hi <= 0.0 || lo >= 1.0) return -kInf;
  if (lo <= 0.0 && hi >= 1.0) return logq;
  if (depth > kIntervalDepthCap || logq < kLogFloor) return -kInf;
  double acc = -kInf;
  for (std::size_t m = 0; m < f.maps.size(); ++m) {
    const double o = f.maps[m].offset, s = f.maps[m].scale;
    const double lq = logq + std::log(f.probs[m]);
    if (hi <= o) break;  // maps sorted by offset
    if (lo >= o + s) continue;
    double contrib;
    if (lo <= o && hi >= o + s) {
      contrib = lq;
    } else if (s == 1.0) {
      contrib = lq + std::log(std::min(hi, 1.0) - std::max(lo, 0.0));
    } else {
      contrib = ifs_log_interval(f, (std::max(lo, o) - o) / s,
                                 (std::min(hi, o + s) - o) / s, depth + 1, lq);
    }
    acc = logaddexp(acc, contrib);
  }
  return acc;
}

double digit_log_interval_rec(const DigitProductMeasure& d, double lo, double hi,
                              std::int64_t n, double cell_lo, double width,
                              double logq) {
  const double cell_hi = cell_lo + width;
  if (cell_hi <= lo || cell_lo >= hi) return -kInf;
  if (lo <= cell_lo && cell_hi <= hi) return logq;
  if (n > kIntervalDepthCap || logq < kLogFloor) return -kInf;
  const auto& law = d.law.at(n);
  const double w2 = width / d.base;
  double acc = -kInf;
  for (int j = 0; j < d.base; ++j) {
    if (law[j] == 0.0) continue;
    acc = logaddexp(acc, digit_log_interval_rec(d, lo, hi, n + 1, cell_lo + j * w2,
                                                w2, logq + std::log(law[j])));
  }
  return acc;
}

double atomic_log_interval(const AtomicMeasure& a, double lo, double hi) {
  double sum = 0.0;
  for (const auto& [pos, w] : a.atoms) {
    const double x = pos / kTwoPi;
    if (x > lo && x < hi) sum += w;
  }
  return sum > 0.0 ? std::log(sum) : -kInf;
}

double log_interval(const SpectralMeasure::Node& node, double lo, double hi) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          return atomic_log_interval(n, lo, hi);
        } else if constexpr (std::is_same_v<T, IfsMeasure>) {
          return ifs_log_interval(n, lo, hi, 0, 0.0);
        } else if constexpr (std::is_same_v<T, DigitProductMeasure>) {
          return digit_log_interval_rec(n, lo, hi, 1, 0.0, 1.0, 0.0);
        } else {
          double a = -kInf, b = -kInf;
          if (n.point_mass > 0.0)
            a = std::log(n.point_mass) + atomic_log_interval(n.point_part, lo, hi);
          if (n.point_mass < 1.0)
            b = std::log1p(-n.point_mass) + log_interval(n.continuous_part->node(), lo, hi);
          return logaddexp(a, b);
        }
      },
      node);
}

// log mu([lo, hi)), or of [lo, hi] when closed_right; atoms enter through the
// atomic and mixture branches, continuous parts ignore the boundary.
double log_halfopen(const SpectralMeasure::Node& node, double lo, double hi,
                    bool closed_right) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          double sum = 0.0;
          for (const auto& [pos, w] : n.atoms) {
            const double x = pos / kTwoPi;
            if ((x >= lo && x < hi) || (closed_right && x == hi)) sum += w;
          }
          return sum > 0.0 ? std::log(sum) : -kInf;
        } else if constexpr (std::is_same_v<T, IfsMeasure>) {
          return ifs_log_interval(n, lo, hi, 0, 0.0);
        } else if constexpr (std::is_same_v<T, DigitProductMeasure>) {
          return digit_log_interval_rec(n, lo, hi, 1, 0.0, 1.0, 0.0);
        } else {
          double a = -kInf, b = -kInf;
          if (n.point_mass > 0.0)
            a = std::log(n.point_mass) +
                log_halfopen(SpectralMeasure::Node(n.point_part), lo, hi, closed_right);
          if (n.point_mass < 1.0)
            b = std::log1p(-n.point_mass) +
                log_halfopen(n.continuous_part->node(), lo, hi, closed_right);
          return logaddexp(a, b);
        }
      },
      node);
}

// ---------------------------------------------------------------------------
// Fourier coefficients, t > 0

std::complex<double> atomic_fourier(const AtomicMeasure& a, std::int64_t t) {
  std::complex<double> z{0.0, 0.0};
  for (const auto& [pos, w] : a.atoms)
    z += w * std::polar(1.0, static_cast<double>(t) * pos);
  return z;
}

// phi(u) = E exp(2*pi*i*u*Y) for the IFS fixed point Y, via the
// self-similarity identity phi(u) = sum_m p_m exp(2*pi*i*u*o_m) phi(u*s_m).
// Memoized on the vector of per-map application counts so algebraically equal
// arguments share one node. The base case replaces Y by its midpoint 1/2,
// an error of at most pi*|u| <= tol, and averaging never amplifies it.
struct IfsFourier {
  const IfsMeasure& f;
  double tol;
  std::map<std::vector<std::uint32_t>, std::complex<double>> memo;

  std::complex<double> eval(std::vector<std::uint32_t>& e, double u) {
    if (kPi * std::abs(u) <= tol) return std::polar(1.0, kPi * u);
    if (auto it = memo.find(e); it != memo.end()) return it->second;
    if (memo.size() > kFourierMemoCap)
      throw ResourceError("fourier: IFS recursion exceeded the memo budget");
    std::complex<double> z{0.0, 0.0};
    for (std::size_t m = 0; m < f.maps.size(); ++m) {
      ++e[m];
      z += f.probs[m] * std::polar(1.0, kTwoPi * u * f.maps[m].offset) *
           eval(e, u * f.maps[m].scale);
      --e[m];
    }
    memo.emplace(e, z);
    return z;
  }
};

std::complex<double> ifs_fourier(const IfsMeasure& f, std::int64_t t, double tol) {
  if (f.lebesgue()) return {0.0, 0.0};  // integer t != 0
  IfsFourier ctx{f, tol, {}};
  std::vector<std::uint32_t> e(f.maps.size(), 0);
  return ctx.eval(e, static_cast<double>(t));
}

// mu_hat(t) = prod_n sum_j law_n(j) exp(2*pi*i*t*j*base^-n); the factors from
// position N on differ from 1 by at most 2*pi*t*base^-n each, so truncating
// once 2*pi*t*base^-(N-1) < tol keeps the total error below tol.
std::complex<double> digit_fourier(const DigitProductMeasure& d, std::int64_t t,
                                   double tol) {
  std::complex<double> z{1.0, 0.0};
  double scale = 1.0 / d.base;
  for (std::int64_t n = 1; n <= kDescentCap; ++n) {
    if (kTwoPi * static_cast<double>(t) * scale * d.base < tol) break;
    const auto& law = d.law.at(n);
    std::complex<double> f{0.0, 0.0};
    for (int j = 0; j < d.base; ++j) {
      if (law[j] == 0.0) continue;
      f += law[j] * std::polar(1.0, kTwoPi * static_cast<double>(t) * j * scale);
    }
    z *= f;
    scale /= d.base;
  }
  return z;
}

std::complex<double> fourier_pos(const SpectralMeasure::Node& node, std::int64_t t,
                                 double tol) {
  return std::visit(
      [&](const auto& n) -> std::complex<double> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          return atomic_fourier(n, t);
        } else if constexpr (std::is_same_v<T, IfsMeasure>) {
          return ifs_fourier(n, t, tol);
        } else if constexpr (std::is_same_v<T, DigitProductMeasure>) {
          return digit_fourier(n, t, tol);
        } else {
          return n.point_mass * atomic_fourier(n.point_part, t) +
                 (1.0 - n.point_mass) * fourier_pos(n.continuous_part->node(), t, tol);
        }
      },
      node);
}

// ---------------------------------------------------------------------------
// quantile descents (atomless measures); on CDF plateaus these converge to
// the right edge, matching the digit-address picture of the support

double ifs_quantile(const IfsMeasure& f, double x) {
  double y = 0.0, w = 1.0, u = x;
  for (int guard = 0; guard < kDescentCap && w > 1e-18; ++guard) {
    std::size_t pick = 0;
    double below = 0.0;
    double cum = 0.0;
    for (std::size_t m = 0; m < f.maps.size(); ++m) {
      pick = m;
      below = cum;
      cum += f.probs[m];
      if (u < cum) break;
    }
    u = clamp01((u - below) / f.probs[pick]);
    y += w * f.maps[pick].offset;
    if (f.maps[pick].scale == 1.0) return y + w * u;  // Lebesgue piece
    w *= f.maps[pick].scale;
  }
  return y;
}

double digit_quantile(const DigitProductMeasure& d, double x) {
  double y = 0.0, w = 1.0, u = x;
  for (std::int64_t n = 1; n <= kDescentCap && w > 1e-18; ++n) {
    const auto& law = d.law.at(n);
    int pick = 0;
    double below = 0.0;
    double cum = 0.0;
    for (int j = 0; j < d.base; ++j) {
      if (law[j] == 0.0) continue;
      pick = j;
      below = cum;
      cum += law[j];
      if (u < cum) break;
    }
    u = clamp01((u - below) / law[pick]);
    w /= d.base;
    y += pick * w;
  }
  return y;
}

}  // namespace

// --- DyadicCell -------------------------------------------------------------

double DyadicCell::unit_lo() const {
  return static_cast<double>(index) * std::pow(static_cast<double>(base), -depth);
}

double DyadicCell::unit_hi() const {
  return static_cast<double>(index + 1) * std::pow(static_cast<double>(base), -depth);
}

Interval DyadicCell::interval() const {
  return {kTwoPi * unit_lo(), kTwoPi * unit_hi()};
}

// --- IfsMeasure --------------------------------------------------------------

double IfsMeasure::information_dimension() const {
  if (lebesgue()) return 1.0;
  double num = 0.0, den = 0.0;
  for (std::size_t m = 0; m < maps.size(); ++m) {
    num += probs[m] * std::log(probs[m]);
    den += probs[m] * std::log(maps[m].scale);
  }
  return num / den;
}

bool IfsMeasure::lebesgue() const { return maps.size() == 1 && maps[0].scale == 1.0; }

// --- DigitLaw ----------------------------------------------------------------

DigitLaw DigitLaw::periodic(int base, std::vector<std::vector<double>> pattern) {
  if (base < 2) throw InputError("digit law: base must be at least 2");
  if (pattern.empty()) throw InputError("digit law: empty pattern");
  bool all_deterministic = true;
  for (const auto& row : pattern) {
    if (static_cast<int>(row.size()) != base)
      throw InputError("digit law: each row needs one entry per digit");
    check_probabilities(row, "digit law");
    bool det = false;
    for (double v : row) det = det || v == 1.0;
    all_deterministic = all_deterministic && det;
  }
  if (all_deterministic)
    throw InputError("digit law: a fully deterministic pattern is a single atom");
  DigitLaw law;
  law.factorial_ = false;
  law.pattern_ = std::move(pattern);
  return law;
}

DigitLaw DigitLaw::factorial_blocks() {
  DigitLaw law;
  law.factorial_ = true;
  law.pattern_ = {{1.0, 0.0}, {0.5, 0.5}};  // deterministic zero, fair coin
  return law;
}

const std::vector<double>& DigitLaw::at(std::int64_t n) const {
  if (n < 1) throw InputError("digit law: positions start at 1");
  if (!factorial_)
    return pattern_[static_cast<std::size_t>((n - 1) % pattern_.size())];
  std::int64_t k = 1, fact = 1;  // block k: k! <= n < (k+1)!
  while (n >= fact * (k + 1)) {
    fact *= (k + 1);
    ++k;
  }
  return pattern_[k % 2 == 0 ? 0 : 1];
}

// --- SpectralMeasure ----------------------------------------------------------

SpectralMeasure::SpectralMeasure(Node node, double tol)
    : node_(std::make_shared<const Node>(std::move(node))), tol_(tol) {
  if (!(tol > 0.0) || tol > 1e-2)
    throw InputError("fourier tolerance must lie in (0, 1e-2]");
}

SpectralMeasure SpectralMeasure::atomic(std::vector<std::pair<double, double>> atoms,
                                        double tol) {
  if (atoms.empty()) throw InputError("atomic measure: need at least one atom");
  std::sort(atoms.begin(), atoms.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& [pos, w] = atoms[i];
    if (!(pos >= 0.0) || pos > kTwoPi)
      throw InputError("atomic measure: positions must lie in [0, 2*pi]");
    if (!(w > 0.0)) throw InputError("atomic measure: weights must be positive");
    if (i > 0 && atoms[i - 1].first == pos)
      throw InputError("atomic measure: duplicate atom positions");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw InputError("atomic measure: weights must sum to 1");
  return SpectralMeasure(Node(AtomicMeasure{std::move(atoms)}), tol);
}

SpectralMeasure SpectralMeasure::ifs(std::vector<AffineMap> maps,
                                     std::vector<double> probs, double tol) {
  if (maps.empty() || maps.size() != probs.size())
    throw InputError("ifs measure: need matching nonempty maps and probabilities");
  std::vector<std::size_t> order(maps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return maps[a].offset < maps[b].offset;
  });
  std::vector<AffineMap> sm(maps.size());
  std::vector<double> sp(maps.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sm[i] = maps[order[i]];
    sp[i] = probs[order[i]];
  }
  for (double p : sp)
    if (!(p > 0.0)) throw InputError("ifs measure: probabilities must be positive");
  check_probabilities(sp, "ifs measure");
  if (sm.size() == 1) {
    if (sm[0].scale != 1.0 || std::abs(sm[0].offset) > 1e-12)
      throw InputError("ifs measure: a single map must be the identity (Lebesgue)");
    sm[0].offset = 0.0;
  } else {
    for (std::size_t i = 0; i < sm.size(); ++i) {
      if (!(sm[i].scale > 0.0) || sm[i].scale >= 1.0)
        throw InputError("ifs measure: scales must lie in (0, 1)");
      if (sm[i].offset < -1e-12 || sm[i].offset + sm[i].scale > 1.0 + 1e-12)
        throw InputError("ifs measure: images must lie inside [0, 1]");
      if (i > 0 && sm[i - 1].offset + sm[i - 1].scale > sm[i].offset + 1e-12)
        throw InputError("ifs measure: images must be disjoint");
    }
  }
  return SpectralMeasure(Node(IfsMeasure{std::move(sm), std::move(sp)}), tol);
}

SpectralMeasure SpectralMeasure::digit_product(int base, DigitLaw law, double tol) {
  if (base < 2) throw InputError("digit measure: base must be at least 2");
  if (!law.factorial())
    for (const auto& row : law.pattern())
      if (static_cast<int>(row.size()) != base)
        throw InputError("digit measure: law rows must match the base");
  return SpectralMeasure(Node(DigitProductMeasure{base, std::move(law)}), tol);
}

SpectralMeasure SpectralMeasure::mixture(std::vector<std::pair<double, double>> atoms,
                                         SpectralMeasure continuous, double point_mass,
                                         double tol) {
  if (!(point_mass >= 0.0) || point_mass > 1.0)
    throw InputError("mixture: point mass must lie in [0, 1]");
  if (continuous.has_atoms())
    throw InputError("mixture: the continuous part must be atomless");
  SpectralMeasure pt = SpectralMeasure::atomic(std::move(atoms), tol);
  MixtureMeasure mx;
  mx.point_part = std::get<AtomicMeasure>(pt.node());
  mx.continuous_part = std::make_shared<const SpectralMeasure>(std::move(continuous));
  mx.point_mass = point_mass;
  return SpectralMeasure(Node(std::move(mx)), tol);
}

SpectralMeasure SpectralMeasure::uniform(double tol) {
  return ifs({{1.0, 0.0}}, {1.0}, tol);
}

SpectralMeasure SpectralMeasure::cantor(double tol) {
  return ifs({{1.0 / 3.0, 0.0}, {1.0 / 3.0, 2.0 / 3.0}}, {0.5, 0.5}, tol);
}

SpectralMeasure SpectralMeasure::binomial(double p, double tol) {
  if (!(p > 0.0) || !(p < 1.0))
    throw InputError("binomial measure: p must lie in (0, 1)");
  return digit_product(2, DigitLaw::periodic(2, {{p, 1.0 - p}}), tol);
}

SpectralMeasure SpectralMeasure::appendix(double tol) {
  return digit_product(2, DigitLaw::factorial_blocks(), tol);
}

double SpectralMeasure::cdf(double lambda) const {
  const double x = clamp01(lambda / kTwoPi);
  return mass_below(*node_, x, tol_) + atom_at(*node_, x, tol_);
}

double SpectralMeasure::quantile(double x) const {
  if (has_atoms()) throw InputError("quantile: measure has atoms");
  if (!(x >= 0.0) || !(x <= 1.0))
    throw InputError("quantile: argument must lie in [0, 1]");
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IfsMeasure>) {
          return kTwoPi * ifs_quantile(n, x);
        } else if constexpr (std::is_same_v<T, DigitProductMeasure>) {
          return kTwoPi * digit_quantile(n, x);
        } else if constexpr (std::is_same_v<T, MixtureMeasure>) {
          return n.continuous_part->quantile(x);  // point_mass == 0 here
        } else {
          throw InputError("quantile: measure has atoms");
        }
      },
      *node_);
}

std::complex<double> SpectralMeasure::fourier(std::int64_t t) const {
  if (t == 0) return {1.0, 0.0};
  const std::complex<double> z = fourier_pos(*node_, t < 0 ? -t : t, tol_);
  return t < 0 ? std::conj(z) : z;
}

double SpectralMeasure::cell_mass(const DyadicCell& c) const {
  return std::exp(cell_log_mass(c));
}

double SpectralMeasure::cell_log_mass(const DyadicCell& c) const {
  if (c.base < 2 || c.depth < 0 ||
      c.depth * std::log2(static_cast<double>(c.base)) > 62.5)
    throw InputError("cell: invalid base/depth");
  std::uint64_t total = 1;
  for (int i = 0; i < c.depth; ++i) total *= static_cast<std::uint64_t>(c.base);
  if (c.index >= total) throw InputError("cell: index out of range");
  if (const auto* d = std::get_if<DigitProductMeasure>(node_.get());
      d != nullptr && d->base == c.base) {
    double lm = 0.0;  // exact digit product
    std::uint64_t scale = total / static_cast<std::uint64_t>(c.base);
    std::uint64_t rem = c.index;
    for (int n = 1; n <= c.depth; ++n) {
      const int digit = static_cast<int>(rem / scale);
      rem %= scale;
      if (scale > 1) scale /= static_cast<std::uint64_t>(c.base);
      const double p = d->law.at(n)[digit];
      if (p == 0.0) return -kInf;
      lm += std::log(p);
    }
    return lm;
  }
  if (const auto* f = std::get_if<IfsMeasure>(node_.get());
      f != nullptr && !f->lebesgue()) {
    // digit-aligned system: every map is x -> (x + j)/base for an integer
    // digit j, so cell masses are exact digit products (interval arithmetic
    // would leak slivers across the irrational-looking cell edges)
    std::vector<double> row(static_cast<std::size_t>(c.base), 0.0);
    bool aligned = true;
    for (std::size_t m = 0; m < f->maps.size() && aligned; ++m) {
      const double jb = f->maps[m].offset * c.base;
      const double j = std::round(jb);
      aligned = std::abs(f->maps[m].scale * c.base - 1.0) <= 1e-9 &&
                std::abs(jb - j) <= 1e-9 && j >= 0.0 && j < c.base;
      if (aligned) row[static_cast<std::size_t>(j)] += f->probs[m];
    }
    if (aligned) {
      double lm = 0.0;
      std::uint64_t scale = total / static_cast<std::uint64_t>(c.base);
      std::uint64_t rem = c.index;
      for (int n = 1; n <= c.depth; ++n) {
        const int digit = static_cast<int>(rem / scale);
        rem %= scale;
        if (scale > 1) scale /= static_cast<std::uint64_t>(c.base);
        const double p = row[static_cast<std::size_t>(digit)];
        if (p == 0.0) return -kInf;
        lm += std::log(p);
      }
      return lm;
    }
  }
  const bool last = (c.index == total - 1);
  return log_halfopen(*node_, c.unit_lo(), c.unit_hi(), last);
}

namespace {

void refine_rec(const SpectralMeasure& m, int base, int depth,
                std::uint64_t max_cells, int d, std::uint64_t index, double log_mass,
                std::vector<WeightedCell>& out) {
  if (d == depth) {
    if (out.size() >= max_cells)
      throw ResourceError("refine: cell budget exceeded at depth " +
                          std::to_string(depth));
    out.push_back({DyadicCell{base, depth, index}, log_mass});
    return;
  }
  for (int j = 0; j < base; ++j) {
    const DyadicCell child{base, d + 1, index * static_cast<std::uint64_t>(base) + j};
    const double lm = m.cell_log_mass(child);
    if (lm == -kInf) continue;
    refine_rec(m, base, depth, max_cells, d + 1, child.index, lm, out);
  }
}

}  // namespace

std::vector<WeightedCell> SpectralMeasure::refine(int base, int depth,
                                                  std::uint64_t max_cells) const {
  if (base < 2 || depth < 0)
    throw InputError("refine: base must be >= 2 and depth >= 0");
  if (depth * std::log2(static_cast<double>(base)) > 62.5)
    throw InputError("refine: partition too deep for 64-bit cell indices");
  std::vector<WeightedCell> out;
  if (max_cells == 0) throw ResourceError("refine: zero cell budget");
  if (depth == 0) {
    out.push_back({DyadicCell{base, 0, 0}, 0.0});
    return out;
  }
  refine_rec(*this, base, depth, max_cells, 0, 0, 0.0, out);
  return out;
}

double SpectralMeasure::log_interval_mass(double lo, double hi) const {
  const double a = clamp01(lo / kTwoPi), b = clamp01(hi / kTwoPi);
  if (!(b > a)) return -kInf;
  return log_interval(*node_, a, b);
}

namespace {

double draw_unit(const SpectralMeasure::Node& node, Rng& rng);

double sample_atomic(const AtomicMeasure& a, Rng& rng) {
  const double u = rng.next();
  double cum = 0.0;
  for (const auto& [pos, w] : a.atoms) {
    cum += w;
    if (u < cum) return pos / kTwoPi;
  }
  return a.atoms.back().first / kTwoPi;
}

double sample_ifs(const IfsMeasure& f, Rng& rng) {
  double y = 0.0, w = 1.0;
  for (int guard = 0; guard < kDescentCap && w > 1e-17; ++guard) {
    const double u = rng.next();
    std::size_t pick = f.maps.size() - 1;
    double cum = 0.0;
    for (std::size_t m = 0; m < f.maps.size(); ++m) {
      cum += f.probs[m];
      if (u < cum) {
        pick = m;
        break;
      }
    }
    y += w * f.maps[pick].offset;
    if (f.maps[pick].scale == 1.0) return y + w * rng.next();
    w *= f.maps[pick].scale;
  }
  return y;
}

double sample_digit(const DigitProductMeasure& d, Rng& rng) {
  double y = 0.0, w = 1.0;
  for (std::int64_t n = 1; n <= kDescentCap && w > 1e-17; ++n) {
    const auto& law = d.law.at(n);
    const double u = rng.next();
    int pick = d.base - 1;
    double cum = 0.0;
    for (int j = 0; j < d.base; ++j) {
      cum += law[j];
      if (u < cum) {
        pick = j;
        break;
      }
    }
    w /= d.base;
    y += pick * w;
  }
  return y;
}

double draw_unit(const SpectralMeasure::Node& node, Rng& rng) {
  return std::visit(
      [&](const auto& n) -> double {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) {
          return sample_atomic(n, rng);
        } else if constexpr (std::is_same_v<T, IfsMeasure>) {
          return sample_ifs(n, rng);
        } else if constexpr (std::is_same_v<T, DigitProductMeasure>) {
          return sample_digit(n, rng);
        } else {
          if (rng.next() < n.point_mass) return sample_atomic(n.point_part, rng);
          return draw_unit(n.continuous_part->node(), rng);
        }
      },
      node);
}

}  // namespace

std::vector<double> SpectralMeasure::sample(std::uint64_t seed,
                                            std::size_t count) const {
  Rng rng(seed);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = kTwoPi * draw_unit(*node_, rng);
  return out;
}

std::vector<double> SpectralMeasure::sample_unit(std::uint64_t seed,
                                                 std::size_t count) const {
  Rng rng(seed);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = draw_unit(*node_, rng);
  return out;
}

bool SpectralMeasure::has_atoms() const {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) return true;
        else if constexpr (std::is_same_v<T, MixtureMeasure>) return n.point_mass > 0.0;
        else return false;
      },
      *node_);
}

int SpectralMeasure::natural_base() const {
  return std::visit(
      [](const auto& n) -> int {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, DigitProductMeasure>) {
          return n.base;
        } else if constexpr (std::is_same_v<T, IfsMeasure>) {
          if (n.lebesgue()) return 2;
          const double s = n.maps[0].scale;
          for (const auto& m : n.maps)
            if (std::abs(m.scale - s) > 1e-12) return 2;
          const double r = std::round(1.0 / s);
          if (std::abs(1.0 / s - r) < 1e-9 && r >= 2.0 && r <= 64.0)
            return static_cast<int>(r);
          return 2;
        } else if constexpr (std::is_same_v<T, MixtureMeasure>) {
          return n.continuous_part->natural_base();
        } else {
          return 2;
        }
      },
      *node_);
}

const char* SpectralMeasure::kind_name() const {
  return std::visit(
      [](const auto& n) -> const char* {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, AtomicMeasure>) return "atomic";
        else if constexpr (std::is_same_v<T, IfsMeasure>) return "ifs";
        else if constexpr (std::is_same_v<T, DigitProductMeasure>) return "digit";
        else return "mixture";
      },
      *node_);
}

// --- factorial-block cell masses ----------------------------------------------

double appendix_mu_log2(int k) {
  if (k < 1 || k > 18) throw InputError("appendix mass: k must lie in [1, 18]");
  // number of fair-coin digits among positions 1..k!: the full odd blocks
  // [j!, (j+1)!) for odd j < k, plus position k! itself when block k is odd.
  // Exact in extended precision through k = 18.
  long double coins = 0.0L;
  long double fact = 1.0L;  // j!
  for (int j = 1; j < k; ++j) {
    const long double next = fact * (j + 1);  // (j+1)!
    if (j % 2 == 1) coins += next - fact;
    fact = next;
  }
  if (k % 2 == 1) coins += 1.0L;
  return -static_cast<double>(coins);
}

double appendix_mu_log(int k) { return appendix_mu_log2(k) * std::log(2.0); }

double appendix_mu(int k) { return std::exp2(appendix_mu_log2(k)); }

}  // namespace specdim
