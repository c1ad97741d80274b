#include "specdim/spec_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "specdim/errors.hpp"

namespace specdim {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.contains(it.key()))
      throw InputError("measure spec: unknown field \"" + it.key() + "\" in " + where);
}

double require_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw InputError("measure spec: " + where + " needs numeric \"" + key + "\"");
  return obj[key].get<double>();
}

std::vector<std::pair<double, double>> parse_atoms(const json& params,
                                                   const std::string& where) {
  if (!params.contains("atoms") || !params["atoms"].is_array())
    throw InputError("measure spec: " + where + " needs an \"atoms\" array");
  std::vector<std::pair<double, double>> atoms;
  for (const auto& row : params["atoms"]) {
    if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number())
      throw InputError("measure spec: each atom must be [position, weight]");
    atoms.emplace_back(row[0].get<double>(), row[1].get<double>());
  }
  return atoms;
}

SpectralMeasure parse_with_tol(const json& spec, double tol);

SpectralMeasure parse_kind(const std::string& kind, const json& params, double tol) {
  if (kind == "uniform") {
    reject_unknown_keys(params, {}, "uniform params");
    return SpectralMeasure::uniform(tol);
  }
  if (kind == "cantor") {
    reject_unknown_keys(params, {}, "cantor params");
    return SpectralMeasure::cantor(tol);
  }
  if (kind == "appendix") {
    reject_unknown_keys(params, {}, "appendix params");
    return SpectralMeasure::appendix(tol);
  }
  if (kind == "binomial") {
    reject_unknown_keys(params, {"p"}, "binomial params");
    return SpectralMeasure::binomial(require_number(params, "p", "binomial"), tol);
  }
  if (kind == "atomic") {
    reject_unknown_keys(params, {"atoms"}, "atomic params");
    return SpectralMeasure::atomic(parse_atoms(params, "atomic"), tol);
  }
  if (kind == "ifs") {
    reject_unknown_keys(params, {"scales", "offsets", "probs"}, "ifs params");
    for (const char* key : {"scales", "offsets", "probs"})
      if (!params.contains(key) || !params[key].is_array())
        throw InputError(std::string("measure spec: ifs needs array \"") + key + "\"");
    const auto& scales = params["scales"];
    const auto& offsets = params["offsets"];
    const auto& probs = params["probs"];
    if (scales.size() != offsets.size() || scales.size() != probs.size())
      throw InputError("measure spec: ifs arrays must have equal length");
    std::vector<AffineMap> maps;
    std::vector<double> p;
    for (std::size_t i = 0; i < scales.size(); ++i) {
      if (!scales[i].is_number() || !offsets[i].is_number() || !probs[i].is_number())
        throw InputError("measure spec: ifs arrays must be numeric");
      maps.push_back({scales[i].get<double>(), offsets[i].get<double>()});
      p.push_back(probs[i].get<double>());
    }
    return SpectralMeasure::ifs(std::move(maps), std::move(p), tol);
  }
  if (kind == "digit") {
    reject_unknown_keys(params, {"base", "pattern"}, "digit params");
    if (!params.contains("base") || !params["base"].is_number_integer())
      throw InputError("measure spec: digit needs integer \"base\"");
    if (!params.contains("pattern") || !params["pattern"].is_array())
      throw InputError("measure spec: digit needs a \"pattern\" array of rows");
    std::vector<std::vector<double>> pattern;
    for (const auto& row : params["pattern"]) {
      if (!row.is_array())
        throw InputError("measure spec: digit pattern rows must be arrays");
      std::vector<double> r;
      for (const auto& v : row) {
        if (!v.is_number())
          throw InputError("measure spec: digit pattern entries must be numeric");
        r.push_back(v.get<double>());
      }
      pattern.push_back(std::move(r));
    }
    const int base = params["base"].get<int>();
    return SpectralMeasure::digit_product(base, DigitLaw::periodic(base, pattern), tol);
  }
  if (kind == "mixture") {
    reject_unknown_keys(params, {"P", "point", "continuous"}, "mixture params");
    const double big_p = require_number(params, "P", "mixture");
    if (!params.contains("point") || !params["point"].is_object())
      throw InputError("measure spec: mixture needs object \"point\"");
    reject_unknown_keys(params["point"], {"atoms"}, "mixture point");
    if (!params.contains("continuous") || !params["continuous"].is_object())
      throw InputError("measure spec: mixture needs object \"continuous\"");
    SpectralMeasure cont = parse_with_tol(params["continuous"], tol);
    return SpectralMeasure::mixture(parse_atoms(params["point"], "mixture point"),
                                    std::move(cont), big_p, tol);
  }
  throw InputError(
      "measure spec: unknown kind \"" + kind +
      "\" (expected uniform|cantor|binomial|appendix|atomic|ifs|digit|mixture)");
}

SpectralMeasure parse_with_tol(const json& spec, double default_tol) {
  if (!spec.is_object()) throw InputError("measure spec: expected a JSON object");
  reject_unknown_keys(spec, {"kind", "params", "fourier_tolerance"}, "measure spec");
  if (!spec.contains("kind") || !spec["kind"].is_string())
    throw InputError("measure spec: needs string \"kind\"");
  double tol = default_tol;
  if (spec.contains("fourier_tolerance")) {
    if (!spec["fourier_tolerance"].is_number())
      throw InputError("measure spec: fourier_tolerance must be numeric");
    tol = spec["fourier_tolerance"].get<double>();
  }
  json params = json::object();
  if (spec.contains("params")) {
    if (!spec["params"].is_object())
      throw InputError("measure spec: params must be an object");
    params = spec["params"];
  }
  return parse_kind(spec["kind"].get<std::string>(), params, tol);
}

}  // namespace

SpectralMeasure parse_measure_spec(const nlohmann::json& spec) {
  return parse_with_tol(spec, kDefaultFourierTolerance);
}

SpectralMeasure load_measure_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open measure spec: " + path);
  json spec;
  try {
    in >> spec;
  } catch (const json::parse_error& e) {
    throw InputError("measure spec " + path + ": " + e.what());
  }
  return parse_measure_spec(spec);
}

nlohmann::json canonical_spec(const nlohmann::json& spec) {
  // validate, then echo with defaults resolved
  parse_measure_spec(spec);
  json out = spec;
  if (!out.contains("params")) out["params"] = json::object();
  if (!out.contains("fourier_tolerance"))
    out["fourier_tolerance"] = kDefaultFourierTolerance;
  return out;
}

nlohmann::json describe_measure(const SpectralMeasure& m) {
  json out;
  out["kind"] = m.kind_name();
  out["fourier_tolerance"] = m.fourier_tolerance();
  out["has_atoms"] = m.has_atoms();
  out["natural_base"] = m.natural_base();

  json dims = json::object();
  if (const auto* at = std::get_if<AtomicMeasure>(&m.node())) {
    dims["information"] = 0.0;
    dims["fractal"] = 0.0;
    dims["hausdorff"] = 0.0;
    json atoms = json::array();
    for (const auto& [pos, w] : at->atoms) atoms.push_back({pos, w});
    out["atoms"] = atoms;
  } else if (const auto* f = std::get_if<IfsMeasure>(&m.node())) {
    dims["information"] = f->information_dimension();
    if (f->lebesgue()) {
      dims["fractal"] = 1.0;
      dims["hausdorff"] = 1.0;
    }
  } else if (const auto* d = std::get_if<DigitProductMeasure>(&m.node())) {
    if (d->law.factorial()) {
      dims["hausdorff"] = 0.0;
      dims["fractal"] = 1.0;
      json mu = json::object();
      for (int k = 2; k <= 5; ++k)
        mu[std::to_string(k)] = appendix_mu_log2(k);
      out["block_cell_log2_mass"] = mu;
    } else {
      // mean per-digit entropy over the repeating pattern
      double h = 0.0;
      for (const auto& row : d->law.pattern()) {
        double rh = 0.0;
        for (double p : row) rh += theta(p);
        h += rh;
      }
      h /= static_cast<double>(d->law.pattern().size());
      dims["information"] = h / std::log(static_cast<double>(d->base));
    }
  }
  out["dimensions"] = dims;

  json table = json::array();
  for (std::int64_t t = -8; t <= 8; ++t) {
    const auto z = m.fourier(t);
    table.push_back({t, z.real(), z.imag()});
  }
  out["fourier_table"] = table;
  return out;
}

}  // namespace specdim
