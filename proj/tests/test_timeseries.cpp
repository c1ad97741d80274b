#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specdim/errors.hpp"
#include "specdim/timeseries.hpp"

using namespace specdim;

namespace {

std::string test_path(const char* name) {
  return std::string(SPECDIM_TEST_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("synthesis of a pure tone") {
  const auto m = SpectralMeasure::atomic({{2.0, 1.0}});
  const auto s = synthesize(m, 64, 4, 7);
  REQUIRE(s.values.size() == 64);
  CHECK(s.origin.rfind("synthetic", 0) == 0);
  const auto rot = std::polar(1.0, 2.0);
  for (std::size_t t = 0; t < s.values.size(); ++t) {
    CHECK(std::abs(s.values[t]) == doctest::Approx(1.0).epsilon(1e-12));
    if (t > 0)
      CHECK(std::abs(s.values[t] - s.values[t - 1] * rot) <= 1e-12);
  }
}

TEST_CASE("synthesis is reproducible per seed") {
  const auto m = SpectralMeasure::cantor();
  const auto a = synthesize(m, 256, 8, 42);
  const auto b = synthesize(m, 256, 8, 42);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    CHECK(a.values[i] == b.values[i]);
  const auto c = synthesize(m, 256, 8, 43);
  bool same = true;
  for (std::size_t i = 0; i < c.values.size(); ++i)
    same = same && (a.values[i] == c.values[i]);
  CHECK(!same);

  CHECK_THROWS_AS(synthesize(m, 0, 8, 1), InputError);
  CHECK_THROWS_AS(synthesize(m, 64, 20, 1, 100), ResourceError);
}

TEST_CASE("autocorrelation of a constant series") {
  StationarySeries s;
  s.values.assign(40, {1.0, 0.0});
  const auto r = estimate_autocorrelation(s, 9);
  REQUIRE(r.values.size() == 10);
  CHECK(r.values[0] == std::complex<double>(1.0, 0.0));
  for (std::int64_t t = 0; t <= 9; ++t) {
    const double want = (40.0 - static_cast<double>(t)) / 40.0;
    CHECK(std::abs(r.at(t) - want) <= 1e-15);
    CHECK(r.at(-t) == std::conj(r.at(t)));
  }
  CHECK_THROWS_AS(estimate_autocorrelation(s, 10), InputError);  // >= length/4
  CHECK_THROWS_AS(estimate_autocorrelation(s, -1), InputError);
  CHECK_THROWS_AS(estimate_autocorrelation(StationarySeries{}, 1), InputError);
}

TEST_CASE("autocorrelation of white noise vanishes at lag one") {
  StationarySeries s;
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n(0.0, 1.0);
  s.values.resize(1 << 16);
  for (auto& v : s.values) v = {n(gen), n(gen)};
  const auto r = estimate_autocorrelation(s, 4);
  CHECK(std::abs(r.at(1)) < 0.02);
}

TEST_CASE("synthesized series reproduce the measure's autocorrelation") {
  const auto uniform = synthesize(SpectralMeasure::uniform(), 1 << 16, 12, 1);
  CHECK(std::abs(estimate_autocorrelation(uniform, 4).at(1)) < 0.05);

  const auto m = SpectralMeasure::cantor();
  const auto s = synthesize(m, 1 << 16, 12, 1);
  const auto r = estimate_autocorrelation(s, 32);
  for (std::int64_t t = 0; t <= 32; ++t)
    CHECK(std::abs(r.at(t) - m.fourier(t)) <= 0.05);
}

TEST_CASE("estimated autocorrelation stays positive semidefinite") {
  const auto s = synthesize(SpectralMeasure::cantor(), 1 << 14, 10, 3);
  const auto r = estimate_autocorrelation(s, 64);
  Eigen::MatrixXcd m(65, 65);
  for (int a = 0; a < 65; ++a)
    for (int b = 0; b < 65; ++b) m(a, b) = r.at(b - a);
  const auto eigs = hermitian_eigenvalues(m);
  CHECK(eigs.front() >= -1e-8);
}

TEST_CASE("spectral dimension recovered from data") {
  const std::vector<std::int64_t> times = {8, 16, 32, 64, 128, 256};

  const auto flat = synthesize(SpectralMeasure::uniform(), 1 << 15, 12, 2);
  const auto cf = spectrum_dimension(flat, times);
  CHECK(std::abs(cf.slope - 1.0) <= 0.1);

  const auto tone = synthesize(SpectralMeasure::atomic({{2.0, 1.0}}), 1 << 15, 4, 2);
  const auto ct = spectrum_dimension(tone, times);
  CHECK(std::abs(ct.slope) <= 0.1);

  CHECK_THROWS_AS(spectrum_dimension(flat, {8}), InputError);
  // T must stay under length/4 so the Toeplitz matrix is fully estimated
  CHECK_THROWS_AS(spectrum_dimension(flat, {8, 1 << 14}), InputError);
}

TEST_CASE("series csv round trip") {
  const auto s = synthesize(SpectralMeasure::cantor(), 8, 6, 9);
  const auto path = test_path("roundtrip.csv");
  {
    std::ofstream out(path);
    write_series_csv(s, out);
  }
  const auto back = read_series_csv(path);
  REQUIRE(back.values.size() == s.values.size());
  for (std::size_t i = 0; i < s.values.size(); ++i)
    CHECK(back.values[i] == s.values[i]);
  CHECK(back.origin.find("ingested") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("series csv parse errors carry line numbers") {
  const auto bad_header = test_path("bad_header.csv");
  {
    std::ofstream out(bad_header);
    out << "x,y\n1,2\n";
  }
  CHECK_THROWS_WITH_AS(read_series_csv(bad_header),
                       doctest::Contains("line 1"), InputError);
  std::remove(bad_header.c_str());

  const auto bad_field = test_path("bad_field.csv");
  {
    std::ofstream out(bad_field);
    out << "re,im\n0.5,0.5\nponies,0.5\n";
  }
  CHECK_THROWS_WITH_AS(read_series_csv(bad_field),
                       doctest::Contains("line 3"), InputError);
  std::remove(bad_field.c_str());

  const auto empty = test_path("empty.csv");
  { std::ofstream out(empty); }
  CHECK_THROWS_AS(read_series_csv(empty), InputError);
  std::remove(empty.c_str());

  CHECK_THROWS_AS(read_series_csv(test_path("missing.csv")), InputError);
}
