// Command-line front end: describe measures, scan entropy growth, estimate
// dimensions, and synthesize/analyze stationary series.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "specdim/dimension.hpp"
#include "specdim/entropy.hpp"
#include "specdim/errors.hpp"
#include "specdim/measure.hpp"
#include "specdim/spec_io.hpp"
#include "specdim/timeseries.hpp"

namespace {

using nlohmann::json;
using namespace specdim;

// "2^4..2^11" doubles through the range; "4,8,32" lists explicit values.
std::vector<std::int64_t> parse_times(const std::string& expr) {
  auto parse_value = [](const std::string& tok) -> std::int64_t {
    std::size_t caret = tok.find('^');
    try {
      if (caret != std::string::npos) {
        const long base = std::stol(tok.substr(0, caret));
        const long exp = std::stol(tok.substr(caret + 1));
        if (base != 2 || exp < 0 || exp > 40)
          throw InputError("times: only powers 2^0..2^40 are supported");
        return std::int64_t{1} << exp;
      }
      return std::stoll(tok);
    } catch (const InputError&) {
      throw;
    } catch (...) {
      throw InputError("times: cannot parse \"" + tok + "\"");
    }
  };
  std::vector<std::int64_t> times;
  const std::size_t dots = expr.find("..");
  if (dots != std::string::npos) {
    const std::int64_t lo = parse_value(expr.substr(0, dots));
    const std::int64_t hi = parse_value(expr.substr(dots + 2));
    if (lo < 1 || hi < lo) throw InputError("times: need 1 <= lo <= hi");
    if ((lo & (lo - 1)) != 0 || (hi & (hi - 1)) != 0)
      throw InputError("times: range endpoints must be powers of two");
    for (std::int64_t t = lo; t <= hi; t <<= 1) times.push_back(t);
    return times;
  }
  std::size_t start = 0;
  while (start <= expr.size()) {
    const std::size_t comma = expr.find(',', start);
    const std::string tok =
        expr.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    if (!tok.empty()) times.push_back(parse_value(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (times.empty()) throw InputError("times: empty expression");
  return times;
}

std::pair<int, int> parse_depths(const std::string& expr) {
  try {
    const std::size_t dots = expr.find("..");
    if (dots == std::string::npos) {
      const int d = std::stoi(expr);
      return {d, d};
    }
    return {std::stoi(expr.substr(0, dots)), std::stoi(expr.substr(dots + 2))};
  } catch (...) {
    throw InputError("depths: cannot parse \"" + expr + "\" (use \"a..b\")");
  }
}

struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file.open(path);
    if (!file) throw InputError("cannot open output file: " + path);
    stream = &file;
  }
};

json load_spec_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open measure spec: " + path);
  json spec;
  try {
    in >> spec;
  } catch (const json::parse_error& e) {
    throw InputError(std::string("measure spec ") + path + ": " + e.what());
  }
  return spec;
}

int cmd_describe(const std::string& spec_path, const std::string& output) {
  const json spec = load_spec_json(spec_path);
  const SpectralMeasure m = parse_measure_spec(spec);
  json out = describe_measure(m);
  out["config"] = {{"spec", canonical_spec(spec)}};
  Output o(output);
  *o.stream << out.dump(2) << '\n';
  return 0;
}

json curve_to_json(const EntropyCurve& c) {
  json points = json::array();
  for (const auto& [T, S] : c.points) {
    const double lnT = std::log(static_cast<double>(T));
    json p = {{"T", T}, {"S", S}};
    p["S_over_lnT"] = lnT > 0.0 ? json(S / lnT) : json(nullptr);
    points.push_back(p);
  }
  return {{"points", points},
          {"fit",
           {{"slope", c.slope},
            {"intercept", c.intercept},
            {"residual", c.residual},
            {"window", {c.fit_window.first, c.fit_window.second}}}}};
}

void write_curve_csv(const EntropyCurve& c, std::ostream& out) {
  out.precision(17);
  out << "T,S,S_over_lnT\n";
  for (const auto& [T, S] : c.points) {
    const double lnT = std::log(static_cast<double>(T));
    out << T << ',' << S << ',';
    if (lnT > 0.0) out << S / lnT;
    else out << "nan";
    out << '\n';
  }
}

int cmd_entropy_scan(const std::string& spec_path, const std::string& times_expr,
                     const std::string& method_name, const std::string& output,
                     const std::string& format) {
  const json spec = load_spec_json(spec_path);
  const SpectralMeasure m = parse_measure_spec(spec);
  const auto times = parse_times(times_expr);
  EntropyMethod method;
  if (method_name == "eig") method = EntropyMethod::eig;
  else if (method_name == "bf") method = EntropyMethod::bf;
  else throw InputError("method must be \"eig\" or \"bf\"");
  const EntropyCurve curve = entropy_curve(m, times, method);
  const json config = {{"spec", canonical_spec(spec)},
                       {"times", times},
                       {"method", method_name}};
  Output o(output);
  if (format == "json") {
    json out = curve_to_json(curve);
    out["command"] = "entropy-scan";
    out["config"] = config;
    *o.stream << out.dump(2) << '\n';
  } else if (format == "csv") {
    write_curve_csv(curve, *o.stream);
    json summary = curve_to_json(curve)["fit"];
    summary["config"] = config;
    std::cerr << summary.dump() << '\n';
  } else {
    throw InputError("format must be \"csv\" or \"json\"");
  }
  return 0;
}

int cmd_dimension(const std::string& kind, const std::string& spec_path, int base,
                  const std::string& depths_expr, double epsilon,
                  std::uint64_t seed, std::int64_t samples,
                  const std::string& output) {
  const json spec = load_spec_json(spec_path);
  const SpectralMeasure m = parse_measure_spec(spec);
  const int use_base = base > 0 ? base : m.natural_base();
  DimensionEstimate est;
  json config = {{"spec", canonical_spec(spec)}, {"kind", kind}};
  if (kind == "info" || kind == "fractal") {
    const auto [lo, hi] = parse_depths(depths_expr.empty() ? "4..12" : depths_expr);
    config["base"] = use_base;
    config["depths"] = {lo, hi};
    if (kind == "info") {
      est = information_dimension(m, use_base, lo, hi);
    } else {
      config["epsilon"] = epsilon;
      est = fractal_dimension(m, epsilon, use_base, lo, hi);
    }
  } else if (kind == "hausdorff") {
    std::vector<double> scales;
    const auto* digit = std::get_if<DigitProductMeasure>(&m.node());
    if (depths_expr.empty() && digit != nullptr && digit->law.factorial()) {
      scales = factorial_scales(5);
      config["scales"] = "factorial(2..5)";
    } else {
      const auto [lo, hi] = parse_depths(depths_expr.empty() ? "8..24" : depths_expr);
      scales = geometric_scales(use_base, lo, hi);
      config["base"] = use_base;
      config["depths"] = {lo, hi};
    }
    config["seed"] = seed;
    config["samples"] = samples;
    est = hausdorff_estimate(m, seed, static_cast<std::size_t>(samples), scales);
  } else {
    throw InputError("dimension kind must be info, fractal, or hausdorff");
  }
  json out = {{"command", "dimension"},
              {"kind", kind},
              {"value", est.value},
              {"value_low", est.value_low},
              {"residual", est.residual},
              {"config", config}};
  json per = json::array();
  for (const auto& [d, v] : est.per_depth) per.push_back({d, v});
  out["per_depth"] = per;
  Output o(output);
  *o.stream << out.dump(2) << '\n';
  return 0;
}

int cmd_ts_synth(const std::string& spec_path, std::int64_t length,
                 const std::string& depths_expr, std::uint64_t seed,
                 const std::string& output) {
  const json spec = load_spec_json(spec_path);
  const SpectralMeasure m = parse_measure_spec(spec);
  const int depth = parse_depths(depths_expr.empty() ? "12" : depths_expr).second;
  const StationarySeries s = synthesize(m, length, depth, seed);
  Output o(output);
  write_series_csv(s, *o.stream);
  return 0;
}

int cmd_ts_analyze(const std::string& input, const std::string& times_expr,
                   const std::string& output, const std::string& format) {
  const StationarySeries s = read_series_csv(input);
  const auto times = parse_times(times_expr);
  const EntropyCurve curve = spectrum_dimension(s, times);
  const json config = {{"input", input}, {"times", times}, {"origin", s.origin}};
  Output o(output);
  if (format == "json") {
    json out = curve_to_json(curve);
    out["command"] = "timeseries-analyze";
    out["config"] = config;
    out["dimension"] = curve.slope;
    *o.stream << out.dump(2) << '\n';
  } else if (format == "csv") {
    write_curve_csv(curve, *o.stream);
    json summary = curve_to_json(curve)["fit"];
    summary["config"] = config;
    std::cerr << summary.dump() << '\n';
  } else {
    throw InputError("format must be \"csv\" or \"json\"");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral-measure entropy and dimension toolkit"};
  app.require_subcommand(1);

  std::string spec_path, times_expr, method = "eig", output, format = "csv";
  std::string depths_expr, input, dim_kind;
  int base = 0;
  double epsilon = 0.01;
  std::uint64_t seed = 1;
  std::int64_t samples = 400, length = 0;

  auto* describe = app.add_subcommand("describe", "profile a measure spec");
  describe->add_option("--spec", spec_path, "measure spec JSON file")->required();
  describe->add_option("--output", output, "output path (default stdout)");

  auto* scan = app.add_subcommand("entropy-scan", "entropy growth over time");
  scan->add_option("--spec", spec_path, "measure spec JSON file")->required();
  scan->add_option("--times", times_expr, "times, e.g. \"2^4..2^11\" or \"4,16,64\"")
      ->required();
  scan->add_option("--method", method, "eig or bf (default eig)");
  scan->add_option("--output", output, "output path (default stdout)");
  scan->add_option("--format", format, "csv or json (default csv)");

  auto* dim = app.add_subcommand("dimension", "dimension estimators");
  dim->add_option("kind", dim_kind, "info, fractal, or hausdorff")->required();
  dim->add_option("--spec", spec_path, "measure spec JSON file")->required();
  dim->add_option("--base", base, "partition base (default: natural base)");
  dim->add_option("--depths", depths_expr, "depth range \"a..b\"");
  dim->add_option("--epsilon", epsilon, "cover mass deficit (fractal; default 0.01)");
  dim->add_option("--seed", seed, "sampling seed (hausdorff; default 1)");
  dim->add_option("--samples", samples, "sample count (hausdorff; default 400)");
  dim->add_option("--output", output, "output path (default stdout)");

  auto* ts = app.add_subcommand("timeseries", "stationary series tools");
  ts->require_subcommand(1);
  auto* synth = ts->add_subcommand("synth", "synthesize a series from a measure");
  synth->add_option("--spec", spec_path, "measure spec JSON file")->required();
  synth->add_option("--length", length, "number of samples")->required();
  synth->add_option("--depths", depths_expr, "refinement depth (default 12)");
  synth->add_option("--seed", seed, "phase seed (default 1)");
  synth->add_option("--output", output, "output path (default stdout)");
  auto* analyze = ts->add_subcommand("analyze", "entropy curve from series data");
  analyze->add_option("--input", input, "series CSV (header re,im)")->required();
  analyze->add_option("--times", times_expr, "times, e.g. \"2^3..2^9\"")->required();
  analyze->add_option("--output", output, "output path (default stdout)");
  analyze->add_option("--format", format, "csv or json (default csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (describe->parsed()) return cmd_describe(spec_path, output);
    if (scan->parsed())
      return cmd_entropy_scan(spec_path, times_expr, method, output, format);
    if (dim->parsed())
      return cmd_dimension(dim_kind, spec_path, base, depths_expr, epsilon, seed,
                           samples, output);
    if (ts->parsed()) {
      if (synth->parsed()) return cmd_ts_synth(spec_path, length, depths_expr, seed, output);
      if (analyze->parsed()) return cmd_ts_analyze(input, times_expr, output, format);
    }
  } catch (const specdim::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const specdim::ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
