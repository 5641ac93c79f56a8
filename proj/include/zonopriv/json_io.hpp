#pragma once

#include <json.hpp>

#include "zonopriv/noise_model.hpp"
#include "zonopriv/zonotope.hpp"

namespace zonopriv {

using json = nlohmann::json;

/// {"center": [...], "generators": [[row 0], ..., [row n-1]]}.
json zonotope_to_json(const Zonotope& z);
Zonotope zonotope_from_json(const json& j);

json vector_to_json(const Vector& v);
Vector vector_from_json(const json& j);
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j, Eigen::Index rows_hint = -1);

/// {"d", "N", "epsilon", "s", "delta", "p", "params", "seed", "kind"}.
json distribution_to_json(const TruncatedDistribution& dist);

/// Rebuilds and re-validates the distribution. The stored delta must match
/// the recomputed accountant value within 1e-12.
TruncatedDistribution distribution_from_json(const json& j);

std::string_view noise_kind_name(NoiseKind kind) noexcept;

} // namespace zonopriv
