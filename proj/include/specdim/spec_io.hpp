#pragma once

// JSON measure specifications:
//   {"kind": "...", "params": {...}, "fourier_tolerance": 1e-10}
// kinds: uniform | cantor | binomial | appendix | atomic | ifs | digit |
// mixture. Unknown fields are rejected so typos fail loudly.

#include <json.hpp>

#include <string>

#include "specdim/measure.hpp"

namespace specdim {

SpectralMeasure parse_measure_spec(const nlohmann::json& spec);
SpectralMeasure load_measure_spec(const std::string& path);

// Resolved echo of a spec (defaults filled in), for provenance in outputs.
nlohmann::json canonical_spec(const nlohmann::json& spec);

// Profile of a measure: kind, tolerance, closed-form dimensions where the
// structure pins them, a short Fourier table, and the distinguished
// factorial-block masses when applicable.
nlohmann::json describe_measure(const SpectralMeasure& m);

}  // namespace specdim
