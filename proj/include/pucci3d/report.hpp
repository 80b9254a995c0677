#pragma once

// JSON plumbing shared by the report types.

#include <json.hpp>

#include "pucci3d/geometry.hpp"
#include "pucci3d/symmat.hpp"

namespace pucci3d {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

json to_json(const Vec3& v);
Vec3 vec3_from_json(const json& j);
json params_json(const ShapeParams& sp, const EllipticityParams& ep);

/// Doubles as JSON numbers lose nothing (nlohmann prints shortest round-trip
/// representations), but non-finite values need a string spelling.
json number(double v);

}  // namespace pucci3d
