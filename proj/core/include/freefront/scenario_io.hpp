#pragma once

#include <string>

#include "freefront/field_model.hpp"

namespace freefront {

/**
 * Scenario files are JSON objects with keys "gamma", "velocity",
 * "gamma_star", "L0", "T", "X_max" and optional "bounds".  A field is either
 * a built-in family, e.g.
 *
 *   {"kind": "constant", "value": 0.2}
 *   {"kind": "affine_t", "a0": 1.0, "a1": -0.05}
 *   {"kind": "gauss_band", "a0": 1.0, "a1": 0.0, "gamma0": 0.5}
 *
 * or a free-form formula in t and x, {"formula": "1 - x*exp(-x^2)"}.
 * "bounds" may declare any of u_lip, u0_max, gamma_max, c_gamma, eta_star.
 * Unknown keys anywhere raise SchemaError with the offending key path.
 */
Scenario parse_scenario_json(const std::string& text);

Scenario read_scenario(const std::string& path);

/** Canonical serialization; parse(serialize(sc)) reproduces sc. */
std::string scenario_to_json(const Scenario& sc);

}  // namespace freefront
