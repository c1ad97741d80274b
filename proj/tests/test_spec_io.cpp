#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <string>

#include "specdim/errors.hpp"
#include "specdim/spec_io.hpp"

using namespace specdim;
using nlohmann::json;

namespace {

std::string test_path(const char* name) {
  return std::string(SPECDIM_TEST_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("every measure kind parses from json") {
  CHECK(std::string(parse_measure_spec(json::parse(R"({"kind":"uniform"})")).kind_name()) ==
        "ifs");
  CHECK(parse_measure_spec(json::parse(R"({"kind":"cantor"})")).natural_base() == 3);
  CHECK(parse_measure_spec(json::parse(R"({"kind":"appendix"})")).natural_base() == 2);
  CHECK(std::string(parse_measure_spec(
                        json::parse(R"({"kind":"binomial","params":{"p":0.7}})"))
                        .kind_name()) == "digit");

  const auto atomic = parse_measure_spec(
      json::parse(R"({"kind":"atomic","params":{"atoms":[[1.0,0.25],[4.0,0.75]]}})"));
  CHECK(atomic.has_atoms());
  CHECK(atomic.cdf(2.0) == doctest::Approx(0.25).epsilon(1e-12));

  const auto ifs = parse_measure_spec(json::parse(
      R"({"kind":"ifs","params":{"scales":[0.5,0.25],"offsets":[0.0,0.75],"probs":[0.5,0.5]}})"));
  CHECK(std::string(ifs.kind_name()) == "ifs");

  const auto digit = parse_measure_spec(json::parse(
      R"({"kind":"digit","params":{"base":3,"pattern":[[0.5,0.0,0.5]]}})"));
  CHECK(digit.natural_base() == 3);

  const auto mix = parse_measure_spec(json::parse(R"({
    "kind": "mixture",
    "params": {"P": 0.5, "point": {"atoms": [[3.14159, 1.0]]},
               "continuous": {"kind": "cantor"}}})"));
  CHECK(std::string(mix.kind_name()) == "mixture");
  CHECK(mix.has_atoms());

  // tolerance override propagates
  const auto loose = parse_measure_spec(
      json::parse(R"({"kind":"cantor","fourier_tolerance":1e-6})"));
  CHECK(loose.fourier_tolerance() == 1e-6);
}

TEST_CASE("unknown fields and kinds are rejected") {
  CHECK_THROWS_AS(parse_measure_spec(json::parse(R"({"kind":"gauss"})")), InputError);
  CHECK_THROWS_AS(parse_measure_spec(json::parse(R"({"kind":"uniform","parms":{}})")),
                  InputError);
  CHECK_THROWS_AS(
      parse_measure_spec(json::parse(R"({"kind":"uniform","params":{"p":1}})")),
      InputError);
  CHECK_THROWS_AS(
      parse_measure_spec(json::parse(R"({"kind":"binomial","params":{}})")),
      InputError);
  CHECK_THROWS_AS(parse_measure_spec(json::parse(R"({"params":{}})")), InputError);
  CHECK_THROWS_AS(parse_measure_spec(json::parse(R"([1,2,3])")), InputError);
  CHECK_THROWS_AS(
      parse_measure_spec(json::parse(
          R"({"kind":"atomic","params":{"atoms":[[1.0]]}})")),
      InputError);
  CHECK_THROWS_AS(
      parse_measure_spec(json::parse(
          R"({"kind":"ifs","params":{"scales":[0.5],"offsets":[0.0,0.5],"probs":[1.0]}})")),
      InputError);
  CHECK_THROWS_AS(
      parse_measure_spec(json::parse(
          R"({"kind":"digit","params":{"base":2,"pattern":[[0.7,0.7]]}})")),
      InputError);
  CHECK_THROWS_AS(
      parse_measure_spec(json::parse(
          R"({"kind":"mixture","params":{"P":0.5,"point":{"atoms":[[0.0,1.0]]},
              "continuous":{"kind":"atomic","params":{"atoms":[[1.0,1.0]]}}}})")),
      InputError);
}

TEST_CASE("canonical spec fills defaults") {
  const auto c = canonical_spec(json::parse(R"({"kind":"uniform"})"));
  CHECK(c["kind"] == "uniform");
  CHECK(c["params"].is_object());
  CHECK(c["params"].empty());
  CHECK(c["fourier_tolerance"].get<double>() == kDefaultFourierTolerance);

  const auto keep = canonical_spec(
      json::parse(R"({"kind":"binomial","params":{"p":0.8},"fourier_tolerance":1e-8})"));
  CHECK(keep["params"]["p"].get<double>() == 0.8);
  CHECK(keep["fourier_tolerance"].get<double>() == 1e-8);

  CHECK_THROWS_AS(canonical_spec(json::parse(R"({"kind":"nope"})")), InputError);
}

TEST_CASE("measure description carries structural facts") {
  const auto uniform = describe_measure(SpectralMeasure::uniform());
  CHECK(uniform["kind"] == "ifs");
  CHECK(uniform["dimensions"]["information"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(uniform["dimensions"]["fractal"].get<double>() == 1.0);
  CHECK(uniform["dimensions"]["hausdorff"].get<double>() == 1.0);

  const auto cantor = describe_measure(SpectralMeasure::cantor());
  CHECK(cantor["dimensions"]["information"].get<double>() ==
        doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));
  CHECK(!cantor["has_atoms"].get<bool>());

  const auto appendix = describe_measure(SpectralMeasure::appendix());
  CHECK(appendix["dimensions"]["hausdorff"].get<double>() == 0.0);
  CHECK(appendix["dimensions"]["fractal"].get<double>() == 1.0);
  CHECK(appendix["block_cell_log2_mass"]["2"].get<double>() == -1.0);
  CHECK(appendix["block_cell_log2_mass"]["3"].get<double>() == -2.0);
  CHECK(appendix["block_cell_log2_mass"]["4"].get<double>() == -19.0);
  CHECK(appendix["block_cell_log2_mass"]["5"].get<double>() == -20.0);

  const auto binomial = describe_measure(SpectralMeasure::binomial(0.8));
  CHECK(binomial["dimensions"]["information"].get<double>() ==
        doctest::Approx(0.721928094887362).epsilon(1e-12));

  const auto atomic =
      describe_measure(SpectralMeasure::atomic({{1.0, 0.5}, {4.0, 0.5}}));
  CHECK(atomic["dimensions"]["information"].get<double>() == 0.0);
  CHECK(atomic["atoms"].size() == 2);

  // fourier table is Hermitian with mu_hat(0) = 1
  const auto m = SpectralMeasure::cantor();
  const auto table = describe_measure(m)["fourier_table"];
  REQUIRE(table.size() == 17);
  CHECK(table[8][0].get<int>() == 0);
  CHECK(table[8][1].get<double>() == 1.0);
  CHECK(table[8][2].get<double>() == 0.0);
  for (int i = 0; i < 17; ++i) {
    const int t = table[i][0].get<int>();
    CHECK(t == i - 8);
    const std::complex<double> z{table[i][1].get<double>(), table[i][2].get<double>()};
    const auto want = m.fourier(t);
    CHECK(std::abs(z - want) <= 1e-15);
  }
}

TEST_CASE("specs load from files with errors naming the path") {
  const auto good = test_path("good_spec.json");
  {
    std::ofstream out(good);
    out << R"({"kind": "cantor"})";
  }
  CHECK(load_measure_spec(good).natural_base() == 3);
  std::remove(good.c_str());

  const auto broken = test_path("broken_spec.json");
  {
    std::ofstream out(broken);
    out << R"({"kind": )";
  }
  CHECK_THROWS_WITH_AS(load_measure_spec(broken), doctest::Contains("broken_spec"),
                       InputError);
  std::remove(broken.c_str());

  CHECK_THROWS_AS(load_measure_spec(test_path("no_such_spec.json")), InputError);
}
