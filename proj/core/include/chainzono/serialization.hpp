#pragma once

#include <json.hpp>

#include "chainzono/zonotope.hpp"

namespace chainzono {

using Json = nlohmann::ordered_json;

Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& j);

/// Record with fixed field order {n, n_g, n_c, G, c, A, b, lo, hi};
/// matrices are flattened row-major.
Json to_json(const Zonotope& Z);
Zonotope zonotope_from_json(const Json& j);

Json to_json(const IntervalHull& hull);

}  // namespace chainzono
