#pragma once

#include <string>

#include <json.hpp>

#include "sdifflab/fields.hpp"

namespace sdifflab {

/// Loss-free JSON round trip: one record per (k, parity[, component]) with the
/// exact double coefficient, emitted in the canonical mode order.
nlohmann::json to_json(const ScalarField& f);
nlohmann::json to_json(const VectorField& u);
ScalarField scalar_from_json(const nlohmann::json& j);
VectorField vector_from_json(const nlohmann::json& j);

/// Symbolic mode-list spec used by experiment configs, e.g.
///   {"dim":1, "trunc":8, "modes":[{"k":[1],"parity":"cos","coeff":0.5}]}
ScalarField scalar_from_spec(const nlohmann::json& spec);

}  // namespace sdifflab
