#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "specdim/kernels.hpp"
#include "specdim/measure.hpp"

using namespace specdim;
using namespace specdim::kernels;

namespace {

std::vector<SpectralComponent> make_components(std::size_t count) {
  std::vector<SpectralComponent> comps(count);
  const double amp = 1.0 / std::sqrt(static_cast<double>(count));
  for (std::size_t j = 0; j < count; ++j) {
    comps[j].omega = kTwoPi * static_cast<double>(j * j % 1009) / 1009.0;
    comps[j].amplitude = amp;
    comps[j].phase = kTwoPi * static_cast<double>((7 * j) % 513) / 513.0;
  }
  return comps;
}

}  // namespace

TEST_CASE("chunked synthesis matches the serial reference") {
  const auto comps = make_components(300);
  std::vector<std::complex<double>> a(3000), b(3000);
  synthesize_serial(comps, a);
  synthesize_parallel(comps, b);
  for (std::size_t t = 0; t < a.size(); ++t)
    CHECK(std::abs(a[t] - b[t]) <= 1e-9);

  // direct evaluation at a few far-out points bounds the recurrence drift
  for (std::size_t t : {0u, 1024u, 2999u}) {
    std::complex<double> direct = 0.0;
    for (const auto& c : comps)
      direct += c.amplitude * std::polar(1.0, c.omega * static_cast<double>(t) + c.phase);
    CHECK(std::abs(a[t] - direct) <= 1e-9);
  }
}

TEST_CASE("parallel autocorrelation is bit-identical to serial") {
  const auto comps = make_components(40);
  std::vector<std::complex<double>> x(4096);
  synthesize_serial(comps, x);
  std::vector<std::complex<double>> ra(257), rb(257);
  autocorrelation_serial(x, ra);
  autocorrelation_parallel(x, rb);
  for (std::size_t t = 0; t < ra.size(); ++t) CHECK(ra[t] == rb[t]);
}

TEST_CASE("parallel fourier sweep matches serial") {
  for (const auto& m : {SpectralMeasure::cantor(), SpectralMeasure::appendix()}) {
    const auto a = fourier_sweep_serial(m, 128);
    const auto b = fourier_sweep_parallel(m, 128);
    REQUIRE(a.size() == b.size());
    for (std::size_t t = 0; t < a.size(); ++t)
      CHECK(std::abs(a[t] - b[t]) <= 1e-12);
  }
}

TEST_CASE("mean power spectrum matches serial and conserves energy") {
  const auto m = SpectralMeasure::cantor();
  std::vector<double> q(256);
  for (std::size_t k = 0; k < q.size(); ++k)
    q[k] = m.quantile((static_cast<double>(k) + 0.5) / static_cast<double>(q.size()));
  const auto a = mean_power_spectrum_serial(q, 16);
  const auto b = mean_power_spectrum_parallel(q, 16);
  REQUIRE(a.size() == q.size());
  REQUIRE(b.size() == q.size());
  double total = 0.0;
  for (std::size_t f = 0; f < a.size(); ++f) {
    CHECK(std::abs(a[f] - b[f]) <= 1e-12);
    total += a[f];
  }
  // each snapshot is a unit-modulus sequence, so its spectrum sums to one
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}
