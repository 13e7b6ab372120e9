#pragma once

// Potential configuration files (JSON or a TOML subset) and built-in names.
//
//   { "plateau": [a, b],
//     "left_wing":  {"type": "power", "exponent": 2.0, "coefficient": 0.5},
//     "right_wing": {"type": "quadratic", "curvature": 1.0} }
//
// Wing types: power (exponent, coefficient, optional upper_exponent),
// quadratic (curvature), custom-series (terms: [{coefficient, exponent}, ...]).

#include <string>
#include <string_view>

#include <json.hpp>

#include "spectra/potential.hpp"

namespace spectra {

PiecewisePotential potential_from_json(const nlohmann::json& doc);
nlohmann::json potential_to_json(const PiecewisePotential& pot);

/// Parses the TOML subset used by potential files into the equivalent JSON tree.
nlohmann::json parse_toml(std::string_view text);

/// Built-in name (counterexample, gaussian, quartic, asymmetric(ka,kb)) or a
/// path to a .json / .toml file.
PiecewisePotential load_potential(const std::string& name_or_path);

}  // namespace spectra
