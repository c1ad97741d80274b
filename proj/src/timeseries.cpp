#include "specdim/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include "specdim/errors.hpp"
#include "specdim/kernels.hpp"

namespace specdim {

namespace {

// Spectral lines for synthesis: exact atoms plus refinement-cell midpoints of
// the continuous parts, weighted by the mixture split. Order is fixed (atoms
// sorted by angle, then cells by index) so the phase draw is reproducible.
std::vector<kernels::SpectralComponent> spectral_lines(const SpectralMeasure& m,
                                                       int depth,
                                                       std::uint64_t max_cells) {
  std::vector<kernels::SpectralComponent> comps;
  const auto add_atoms = [&](const AtomicMeasure& a, double scale) {
    for (const auto& [pos, w] : a.atoms)
      if (scale * w > 0.0) comps.push_back({pos, std::sqrt(scale * w), 0.0});
  };
  const auto add_cells = [&](const SpectralMeasure& cont, double scale) {
    if (scale <= 0.0) return;
    for (const auto& wc : cont.refine(cont.natural_base(), depth, max_cells)) {
      const Interval iv = wc.cell.interval();
      const double mid = 0.5 * (iv.lo + iv.hi);
      comps.push_back({mid, std::sqrt(scale * wc.mass()), 0.0});
    }
  };
  if (const auto* at = std::get_if<AtomicMeasure>(&m.node())) {
    add_atoms(*at, 1.0);
  } else if (const auto* mx = std::get_if<MixtureMeasure>(&m.node())) {
    add_atoms(mx->point_part, mx->point_mass);
    add_cells(*mx->continuous_part, 1.0 - mx->point_mass);
  } else {
    add_cells(m, 1.0);
  }
  return comps;
}

}  // namespace

StationarySeries synthesize(const SpectralMeasure& m, std::int64_t length, int depth,
                            std::uint64_t seed, std::uint64_t max_cells) {
  if (length < 1) throw InputError("synthesize: length must be positive");
  if (depth < 0) throw InputError("synthesize: depth must be nonnegative");
  auto comps = spectral_lines(m, depth, max_cells);
  std::mt19937_64 gen(seed);
  for (auto& c : comps)
    c.phase = kTwoPi * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
  StationarySeries s;
  s.values.resize(static_cast<std::size_t>(length));
  kernels::synthesize_parallel(comps, s.values);
  std::ostringstream origin;
  origin << "synthetic(kind=" << m.kind_name() << ", depth=" << depth
         << ", seed=" << seed << ", length=" << length << ")";
  s.origin = origin.str();
  return s;
}

std::complex<double> AutocorrelationEstimate::at(std::int64_t t) const {
  const std::int64_t a = t < 0 ? -t : t;
  if (a >= static_cast<std::int64_t>(values.size()))
    throw InputError("autocorrelation: lag outside the estimated range");
  const std::complex<double> v = values[static_cast<std::size_t>(a)];
  return t < 0 ? std::conj(v) : v;
}

AutocorrelationEstimate estimate_autocorrelation(const StationarySeries& s,
                                                 std::int64_t maxlag) {
  const std::int64_t n = static_cast<std::int64_t>(s.values.size());
  if (maxlag < 0) throw InputError("autocorrelation: maxlag must be nonnegative");
  if (n < 4 || maxlag >= n / 4)
    throw InputError("autocorrelation: series too short; need maxlag < length/4");
  AutocorrelationEstimate est;
  est.values.resize(static_cast<std::size_t>(maxlag) + 1);
  kernels::autocorrelation_parallel(s.values, est.values);
  const double r0 = est.values[0].real();
  if (!(r0 > 0.0)) throw InputError("autocorrelation: series has zero power");
  for (auto& v : est.values) v /= r0;
  est.values[0] = {1.0, 0.0};
  return est;
}

EntropyCurve spectrum_dimension(const StationarySeries& s,
                                const std::vector<std::int64_t>& times,
                                double fit_fraction) {
  if (times.size() < 2) throw InputError("spectrum dimension: need at least two times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 1) throw InputError("spectrum dimension: times must be positive");
    if (i > 0 && times[i] <= times[i - 1])
      throw InputError("spectrum dimension: times must be strictly increasing");
  }
  const std::int64_t maxlag = times.back() - 1;
  const auto acf = estimate_autocorrelation(s, maxlag);
  std::vector<std::pair<std::int64_t, double>> pts;
  pts.reserve(times.size());
  for (std::int64_t T : times) {
    Eigen::MatrixXcd a(T, T);
    for (std::int64_t r = 0; r < T; ++r) {
      for (std::int64_t c = r; c < T; ++c) {
        a(r, c) = acf.values[static_cast<std::size_t>(c - r)];
        a(c, r) = std::conj(a(r, c));
      }
    }
    const auto eigs = hermitian_eigenvalues(a);
    double S = 0.0;
    for (double v : eigs) {
      const double p = std::min(1.0, std::max(0.0, v / static_cast<double>(T)));
      S += theta(p);
    }
    pts.emplace_back(T, S);
  }
  return fit_entropy_curve(std::move(pts), fit_fraction);
}

StationarySeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open series file: " + path);
  StationarySeries s;
  s.origin = "ingested(" + path + ")";
  std::string line;
  std::int64_t lineno = 0;
  auto trim = [](std::string v) {
    const auto b = v.find_first_not_of(" \t\r");
    const auto e = v.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (lineno == 1) {
      if (t != "re,im")
        throw InputError("line 1: expected header \"re,im\", got \"" + t + "\"");
      continue;
    }
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos)
      throw InputError("line " + std::to_string(lineno) + ": expected \"re,im\" pair");
    const std::string a = trim(t.substr(0, comma));
    const std::string b = trim(t.substr(comma + 1));
    double re = 0.0, im = 0.0;
    const auto ra = std::from_chars(a.data(), a.data() + a.size(), re);
    const auto rb = std::from_chars(b.data(), b.data() + b.size(), im);
    if (ra.ec != std::errc{} || ra.ptr != a.data() + a.size() ||
        rb.ec != std::errc{} || rb.ptr != b.data() + b.size())
      throw InputError("line " + std::to_string(lineno) + ": malformed number");
    s.values.emplace_back(re, im);
  }
  if (s.values.empty()) throw InputError("series file has no samples: " + path);
  return s;
}

void write_series_csv(const StationarySeries& s, std::ostream& out) {
  out << "re,im\n";
  out.precision(17);
  for (const auto& v : s.values) out << v.real() << ',' << v.imag() << '\n';
}

}  // namespace specdim
