#pragma once

// Probability measures on the circle [0, 2*pi]: pure point sets, self-similar
// (IFS) measures, independent-digit product measures, and point/continuous
// mixtures. Everything downstream (entropy curves, dimension estimators,
// series synthesis) consumes this interface: CDF, quantile, Fourier
// coefficients, cell masses on uniform partitions, and sampling.

#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace specdim {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kDefaultFourierTolerance = 1e-10;
inline constexpr std::uint64_t kDefaultCellBudget = std::uint64_t{1} << 21;

// -x ln x, extended by theta(0) = 0. Entropy summand.
inline double theta(double x) { return x > 0.0 ? -x * std::log(x) : 0.0; }

// theta(exp(L)) computed from the log mass L, stable for very small masses.
inline double theta_log(double log_mass) {
  if (!(log_mass > -1e308)) return 0.0;
  return -std::exp(log_mass) * log_mass;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

// One cell of the uniform partition of [0, 2*pi] into base^depth pieces.
// Cells are taken left-closed, the last one closed, so atoms land in
// exactly one cell.
struct DyadicCell {
  int base = 2;
  int depth = 0;
  std::uint64_t index = 0;

  double unit_lo() const;  // index / base^depth
  double unit_hi() const;
  Interval interval() const;  // angles
};

struct WeightedCell {
  DyadicCell cell;
  double log_mass;  // natural log; -inf never stored (zero cells are dropped)
  double mass() const { return std::exp(log_mass); }
};

struct AtomicMeasure {
  // (angle, weight), sorted by angle, weights positive and summing to 1.
  std::vector<std::pair<double, double>> atoms;
};

// x -> scale * x + offset on [0, 1].
struct AffineMap {
  double scale = 0.0;
  double offset = 0.0;
};

struct IfsMeasure {
  std::vector<AffineMap> maps;  // sorted by offset, images disjoint in [0, 1]
  std::vector<double> probs;    // positive, sum to 1

  // sum p ln p / sum p ln s; equals 1 for the Lebesgue case.
  double information_dimension() const;
  bool lebesgue() const;  // single map with scale 1
};

// Law of digit a_n (n >= 1) for a product measure in a fixed base. Either a
// repeating pattern of probability vectors, or the factorial-block law in
// base 2: digit n is forced to 0 when k! <= n < (k+1)! for even k and is a
// fair coin for odd k.
class DigitLaw {
 public:
  static DigitLaw periodic(int base, std::vector<std::vector<double>> pattern);
  static DigitLaw factorial_blocks();

  const std::vector<double>& at(std::int64_t n) const;  // n >= 1
  bool factorial() const { return factorial_; }
  const std::vector<std::vector<double>>& pattern() const { return pattern_; }

 private:
  DigitLaw() = default;
  bool factorial_ = false;
  std::vector<std::vector<double>> pattern_;
};

struct DigitProductMeasure {
  int base = 2;
  DigitLaw law;
};

class SpectralMeasure;

struct MixtureMeasure {
  AtomicMeasure point_part;
  std::shared_ptr<const SpectralMeasure> continuous_part;
  double point_mass = 0.0;  // weight of the point part
};

class SpectralMeasure {
 public:
  using Node =
      std::variant<AtomicMeasure, IfsMeasure, DigitProductMeasure, MixtureMeasure>;

  static SpectralMeasure atomic(std::vector<std::pair<double, double>> atoms,
                                double tol = kDefaultFourierTolerance);
  static SpectralMeasure ifs(std::vector<AffineMap> maps, std::vector<double> probs,
                             double tol = kDefaultFourierTolerance);
  static SpectralMeasure digit_product(int base, DigitLaw law,
                                       double tol = kDefaultFourierTolerance);
  static SpectralMeasure mixture(std::vector<std::pair<double, double>> atoms,
                                 SpectralMeasure continuous, double point_mass,
                                 double tol = kDefaultFourierTolerance);

  // Presets.
  static SpectralMeasure uniform(double tol = kDefaultFourierTolerance);
  static SpectralMeasure cantor(double tol = kDefaultFourierTolerance);
  static SpectralMeasure binomial(double p, double tol = kDefaultFourierTolerance);
  static SpectralMeasure appendix(double tol = kDefaultFourierTolerance);

  // F(lambda) = mu([0, lambda]); an atom at lambda is included. Arguments are
  // clamped to [0, 2*pi].
  double cdf(double lambda) const;

  // Generalized inverse of the CDF for atomless measures, mapping the uniform
  // law on [0, 1] onto mu. On a plateau of F it returns the right edge (the
  // digit-address convention), so quantile(U) ~ mu and F(quantile(x)) = x on
  // the support. Throws InputError when the measure has atoms or x is outside
  // [0, 1].
  double quantile(double x) const;

  // mu_hat(t) = integral of e^{i t lambda} d(mu), accurate to
  // fourier_tolerance(); exact at t = 0 and Hermitian in t.
  std::complex<double> fourier(std::int64_t t) const;

  double cell_mass(const DyadicCell& c) const;
  // Natural-log cell mass, exact for digit measures in their own base and
  // evaluated by structure recursion (no CDF cancellation) otherwise.
  // Returns -inf for cells of zero mass.
  double cell_log_mass(const DyadicCell& c) const;

  // All cells of positive mass at the given partition depth. Throws
  // ResourceError when more than max_cells would be produced.
  std::vector<WeightedCell> refine(int base, int depth,
                                   std::uint64_t max_cells = kDefaultCellBudget) const;

  // log mu((lo, hi)): open interval in angles, clipped to [0, 2*pi]; atoms at
  // the endpoints are excluded. -inf when the interval carries no mass.
  double log_interval_mass(double lo, double hi) const;

  // Independent draws from mu; deterministic for a fixed seed.
  std::vector<double> sample(std::uint64_t seed, std::size_t count) const;
  // Same draws in unit coordinates lambda / 2*pi, exact to the last digit
  // position the generator reached; sample() is 2*pi times these (rounded).
  std::vector<double> sample_unit(std::uint64_t seed, std::size_t count) const;

  bool has_atoms() const;
  // Partition base adapted to the structure: the digit base, 1/scale for an
  // equal-scale IFS, otherwise 2.
  int natural_base() const;
  const char* kind_name() const;
  const Node& node() const { return *node_; }
  double fourier_tolerance() const { return tol_; }

 private:
  SpectralMeasure(Node node, double tol);
  std::shared_ptr<const Node> node_;
  double tol_ = kDefaultFourierTolerance;
};

// Masses mu_k of the distinguished factorial-block cells at depth k!: the
// log2 is an exact (negative) integer, so it is the stable representation.
// The linear value underflows to zero from k = 6 on.
double appendix_mu_log2(int k);
double appendix_mu_log(int k);
double appendix_mu(int k);

}  // namespace specdim
