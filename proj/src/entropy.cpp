#include "specdim/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "specdim/errors.hpp"
#include "specdim/fit.hpp"
#include "specdim/kernels.hpp"

namespace specdim {

namespace {

constexpr double kPi = kTwoPi / 2.0;

// (1/T) sum_{s<T} exp(i*s*delta), the normalized Dirichlet average.
std::complex<double> dirichlet_mean(double delta, std::int64_t T) {
  const std::complex<double> w = std::polar(1.0, delta);
  const std::complex<double> den = w - 1.0;
  if (std::abs(den) < 1e-12) return {1.0, 0.0};
  const std::complex<double> num = std::polar(1.0, delta * static_cast<double>(T)) - 1.0;
  return num / (den * static_cast<double>(T));
}

std::pair<DensityMatrixSpectrum, double> spectrum_from_eigs(std::int64_t T,
                                                            std::vector<double> eigs,
                                                            double denom) {
  DensityMatrixSpectrum sp;
  sp.T = T;
  sp.eigenvalues.reserve(eigs.size());
  for (double v : eigs) {
    double p = v / denom;
    p = std::min(1.0, std::max(0.0, p));
    sp.eigenvalues.push_back(p);
  }
  std::sort(sp.eigenvalues.begin(), sp.eigenvalues.end(), std::greater<>());
  double S = 0.0;
  for (double p : sp.eigenvalues) S += theta(p);
  return {std::move(sp), S};
}

std::int64_t next_pow2(std::int64_t v) {
  std::int64_t p = 1;
  while (p < v) p <<= 1;
  return p;
}

}  // namespace

double BasisDistribution::prob(std::int64_t n) const {
  if (n < -n_max || n > n_max) throw InputError("basis distribution: label outside window");
  return probs[static_cast<std::size_t>(n + n_max)];
}

Eigen::MatrixXcd toeplitz(const SpectralMeasure& m, std::int64_t T, std::int64_t cap) {
  if (T < 1) throw InputError("toeplitz: T must be positive");
  if (T > cap)
    throw ResourceError("toeplitz: T = " + std::to_string(T) + " exceeds cap " +
                        std::to_string(cap));
  const auto f = kernels::fourier_sweep_parallel(m, T);
  Eigen::MatrixXcd a(T, T);
  for (std::int64_t s = 0; s < T; ++s) {
    for (std::int64_t t = s; t < T; ++t) {
      a(s, t) = f[static_cast<std::size_t>(t - s)];
      a(t, s) = std::conj(a(s, t));
    }
  }
  return a;
}

std::vector<double> hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw ResourceError("hermitian eigensolve failed to converge");
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

std::pair<DensityMatrixSpectrum, double> eigen_entropy_toeplitz(
    const SpectralMeasure& m, std::int64_t T, std::int64_t cap) {
  auto eigs = hermitian_eigenvalues(toeplitz(m, T, cap));
  return spectrum_from_eigs(T, std::move(eigs), static_cast<double>(T));
}

std::pair<DensityMatrixSpectrum, double> eigen_entropy(const SpectralMeasure& m,
                                                       std::int64_t T,
                                                       std::int64_t cap) {
  const auto* at = std::get_if<AtomicMeasure>(&m.node());
  if (at == nullptr) return eigen_entropy_toeplitz(m, T, cap);
  if (T < 1) throw InputError("eigen entropy: T must be positive");
  // Frame matrix A[j][k] = sqrt(w_j w_k) * (1/T) sum_{s<T} e^{i s (l_j - l_k)}
  // has the same nonzero spectrum as the T x T route, already scaled by 1/T.
  const std::int64_t d = static_cast<std::int64_t>(at->atoms.size());
  Eigen::MatrixXcd a(d, d);
  for (std::int64_t j = 0; j < d; ++j) {
    for (std::int64_t k = j; k < d; ++k) {
      const auto& [lj, wj] = at->atoms[static_cast<std::size_t>(j)];
      const auto& [lk, wk] = at->atoms[static_cast<std::size_t>(k)];
      a(j, k) = std::sqrt(wj * wk) * dirichlet_mean(lj - lk, T);
      a(k, j) = std::conj(a(j, k));
    }
  }
  auto eigs = hermitian_eigenvalues(a);
  return spectrum_from_eigs(T, std::move(eigs), 1.0);
}

BasisDistribution bf_distribution(const SpectralMeasure& m, std::int64_t T,
                                  std::int64_t n_max, std::int64_t grid) {
  if (m.has_atoms())
    throw InputError("basis distribution: measure must be atomless");
  if (T < 1) throw InputError("basis distribution: T must be positive");
  if (n_max < 0) throw InputError("basis distribution: n_max must be nonnegative");
  const std::int64_t M = grid;
  if (M <= 0 || (M & (M - 1)) != 0 || M < 4 * std::max(T, n_max))
    throw InputError("basis distribution: grid must be a power of two >= 4*max(T, n_max)");
  // midpoint quantile grid: Q((k + 1/2) / M)
  std::vector<double> q(static_cast<std::size_t>(M));
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < M; ++k)
    q[static_cast<std::size_t>(k)] =
        m.quantile((static_cast<double>(k) + 0.5) / static_cast<double>(M));
  const auto power = kernels::mean_power_spectrum_parallel(q, T);
  BasisDistribution d;
  d.T = T;
  d.n_max = n_max;
  d.probs.resize(static_cast<std::size_t>(2 * n_max + 1));
  double total = 0.0;
  for (std::int64_t n = -n_max; n <= n_max; ++n) {
    const std::int64_t bin = ((n % M) + M) % M;
    const double p = power[static_cast<std::size_t>(bin)];
    d.probs[static_cast<std::size_t>(n + n_max)] = p;
    total += p;
  }
  d.leak = 1.0 - total;
  return d;
}

double shannon_entropy(const BasisDistribution& d) {
  double S = 0.0;
  for (double p : d.probs) S += theta(p);
  return S;
}

double w_quantity(const SpectralMeasure& m, std::int64_t n, std::int64_t N,
                  double keep_mass) {
  if (n == 0) throw InputError("spectral weight: label n must be nonzero");
  if (N < 1) throw InputError("spectral weight: need at least one cell");
  if (!(keep_mass > 0.0) || keep_mass > 1.0)
    throw InputError("spectral weight: keep_mass must lie in (0, 1]");
  // CDF differences over the uniform N-grid partition the full mass exactly
  // (cells close on the right, the first one also on the left).
  std::vector<double> cdf_grid(static_cast<std::size_t>(N) + 1);
  cdf_grid[0] = 0.0;
  for (std::int64_t j = 1; j <= N; ++j)
    cdf_grid[static_cast<std::size_t>(j)] =
        m.cdf(kTwoPi * static_cast<double>(j) / static_cast<double>(N));
  std::vector<double> masses(static_cast<std::size_t>(N));
  for (std::int64_t j = 0; j < N; ++j)
    masses[static_cast<std::size_t>(j)] =
        std::max(0.0, cdf_grid[static_cast<std::size_t>(j + 1)] -
                          cdf_grid[static_cast<std::size_t>(j)]);
  std::sort(masses.begin(), masses.end(), std::greater<>());
  double cum = 0.0, w = 0.0;
  for (double mass : masses) {
    if (cum > keep_mass) break;
    if (mass <= 0.0) break;
    const double s = std::sin(kPi * static_cast<double>(n) * mass);
    w += (s * s) / (kPi * kPi * static_cast<double>(n) * static_cast<double>(n));
    cum += mass;
  }
  return w;
}

std::int64_t n_epsilon(const BasisDistribution& d, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw InputError("window width: eps must lie in (0, 1)");
  const double target = 1.0 - eps * eps;
  double cum = d.prob(0);
  if (cum > target) return 0;
  for (std::int64_t nu = 1; nu <= d.n_max; ++nu) {
    cum += d.prob(nu) + d.prob(-nu);
    if (cum > target) return nu;
  }
  throw InputError("window width: distribution window too small for eps");
}

std::int64_t m_epsilon(const DensityMatrixSpectrum& s, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw InputError("eigenvalue count: eps must lie in (0, 1)");
  const double target = 1.0 - eps;
  double cum = 0.0;
  std::int64_t count = 0;
  for (double p : s.eigenvalues) {
    cum += p;
    ++count;
    if (cum > target) return count;
  }
  // rounding may leave the total a hair under 1 - eps only when eps ~ 0
  return count;
}

LowerBoundCheck lwb_bound(double entropy, std::int64_t m_eps, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw InputError("entropy lower bound: eps must lie in (0, 1)");
  LowerBoundCheck r;
  if (m_eps <= 3) {
    r.bound = -std::numeric_limits<double>::infinity();
    r.holds = true;
    r.vacuous = true;
    return r;
  }
  r.bound = eps * std::log(1.0 / eps) + eps * std::log(static_cast<double>(m_eps - 3));
  r.vacuous = false;
  r.holds = entropy >= r.bound - 1e-12;
  return r;
}

double moment(const BasisDistribution& d, double q) {
  if (!(q > 0.0)) throw InputError("moment: order must be positive");
  double acc = 0.0;
  for (std::int64_t n = -d.n_max; n <= d.n_max; ++n) {
    if (n == 0) continue;
    acc += std::pow(std::abs(static_cast<double>(n)), q) * d.prob(n);
  }
  return acc;
}

EntropyCurve entropy_curve(const SpectralMeasure& m,
                           const std::vector<std::int64_t>& times,
                           EntropyMethod method, const EntropyCurveOptions& opts) {
  if (times.size() < 2) throw InputError("entropy curve: need at least two times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 1) throw InputError("entropy curve: times must be positive");
    if (i > 0 && times[i] <= times[i - 1])
      throw InputError("entropy curve: times must be strictly increasing");
  }
  std::vector<std::pair<std::int64_t, double>> pts;
  pts.reserve(times.size());
  for (std::int64_t T : times) {
    double S;
    if (method == EntropyMethod::eig) {
      S = eigen_entropy(m, T, opts.toeplitz_cap).second;
    } else {
      const std::int64_t n_max = opts.bf_n_max_factor * T;
      const std::int64_t grid = next_pow2(4 * std::max(T, n_max));
      S = shannon_entropy(bf_distribution(m, T, n_max, grid));
    }
    pts.emplace_back(T, S);
  }
  return fit_entropy_curve(std::move(pts), opts.fit_fraction);
}

EntropyCurve fit_entropy_curve(std::vector<std::pair<std::int64_t, double>> points,
                               double fit_fraction) {
  if (points.size() < 2) throw InputError("entropy curve: need at least two points");
  if (!(fit_fraction > 0.0) || fit_fraction > 1.0)
    throw InputError("entropy curve: fit fraction must lie in (0, 1]");
  std::sort(points.begin(), points.end());
  EntropyCurve c;
  c.points = std::move(points);
  const std::size_t n = c.points.size();
  std::size_t n_fit = static_cast<std::size_t>(
      std::ceil(fit_fraction * static_cast<double>(n) - 1e-12));
  n_fit = std::max<std::size_t>(2, std::min(n, n_fit));
  const std::size_t start = n - n_fit;
  std::vector<double> xs, ys;
  xs.reserve(n_fit);
  ys.reserve(n_fit);
  for (std::size_t i = start; i < n; ++i) {
    xs.push_back(std::log(static_cast<double>(c.points[i].first)));
    ys.push_back(c.points[i].second);
  }
  const LineFit f = fit_line(xs, ys);
  c.fit_window = {c.points[start].first, c.points[n - 1].first};
  c.slope = f.slope;
  c.intercept = f.intercept;
  c.residual = f.rms_residual;
  return c;
}

}  // namespace specdim
