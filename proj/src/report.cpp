#include "pucci3d/report.hpp"

#include <cmath>
#include <limits>

#include "pucci3d/error.hpp"

namespace pucci3d {

json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

json to_json(const Vec3& v) { return json::array({number(v[0]), number(v[1]), number(v[2])}); }

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw InvalidInput("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json params_json(const ShapeParams& sp, const EllipticityParams& ep) {
    return {{"lambda", ep.lambda()}, {"Lambda", ep.Lambda()}, {"omega", ep.omega()},
            {"gamma", sp.gamma()},   {"a", sp.a()}};
}

}  // namespace pucci3d
