#pragma once

// JSON form of polytopes:
//
//     {"dim": 2, "facets": [{"normal": [1, 0], "offset": "0"}, ...]}
//     {"dim": 2, "vertices": [["0", "0"], ["1", "0"], ["0", "2"]]}
//
// Coordinates and offsets are integers or strings "p/q" / plain decimals (read exactly).

#include "toricgh/polytope.hpp"

#include "json.hpp"

#include <string>

namespace toricgh {

HPolytope polytope_from_json(const nlohmann::json& j);
nlohmann::json polytope_to_json(const HPolytope& p);

HPolytope load_polytope_file(const std::string& path);

/// Built-in names: square, simplex2, 2simplex2, triangle_bad, rect:a,b, box:a,b[,c...],
/// pentagon:t, dilation:s, segment:l. Parameters are rationals ("1/2") or decimals.
HPolytope catalog_polytope(const std::string& name);

/// P_t = {x >= 0, y >= 0, x <= 2, y <= 1, x + y <= 3 - t}, 0 < t < 1.
HPolytope pentagon_polytope(const Rational& t);

/// A JSON file path, a file name in the shipped catalog directory, or a built-in catalog name.
HPolytope resolve_polytope(const std::string& name_or_path);

nlohmann::json rational_json(const Rational& q);
nlohmann::json vector_json(const RVector& v);

}  // namespace toricgh
