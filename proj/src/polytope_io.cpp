#include "toricgh/polytope_io.hpp"

#include "toricgh/error.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace toricgh {

namespace {

using nlohmann::json;

Rational read_number(const json& v) {
    if (v.is_number_integer()) return Rational(v.get<long long>());
    if (v.is_string()) return parse_decimal(v.get<std::string>());
    if (v.is_number_float()) return rational_from_double(v.get<double>());
    fail(ErrorKind::InvalidInput, "expected a number or a rational string");
}

std::size_t read_dim(const json& j) {
    if (!j.contains("dim") || !j["dim"].is_number_integer() || j["dim"].get<long long>() < 1)
        fail(ErrorKind::InvalidInput, "polytope JSON needs a positive integer \"dim\"");
    return j["dim"].get<std::size_t>();
}

std::vector<Rational> split_params(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(parse_decimal(part));
    return out;
}

}  // namespace

HPolytope pentagon_polytope(const Rational& t) {
    if (t <= 0 || t >= 1) fail(ErrorKind::InvalidInput, "pentagon parameter must lie in (0,1)");
    return HPolytope::from_halfspaces(2, std::vector<Halfspace>{{{1, 0}, 0}, {{0, 1}, 0}, {{-1, 0}, -2},
                                                                {{0, -1}, -1}, {{-1, -1}, t - 3}});
}

nlohmann::json rational_json(const Rational& q) { return to_string(q); }

nlohmann::json vector_json(const RVector& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(to_string(x));
    return a;
}

HPolytope polytope_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorKind::InvalidInput, "polytope JSON must be an object");
    const std::size_t n = read_dim(j);
    if (j.contains("facets")) {
        std::vector<RationalHalfspace> hs;
        for (const auto& f : j["facets"]) {
            if (!f.contains("normal") || !f.contains("offset")) fail(ErrorKind::InvalidInput, "facet needs normal and offset");
            RationalHalfspace h;
            for (const auto& c : f["normal"]) h.normal.push_back(read_number(c));
            h.offset = read_number(f["offset"]);
            hs.push_back(std::move(h));
        }
        return HPolytope::from_halfspaces(n, hs);
    }
    if (j.contains("vertices")) {
        std::vector<RVector> pts;
        for (const auto& v : j["vertices"]) {
            RVector p;
            for (const auto& c : v) p.push_back(read_number(c));
            pts.push_back(std::move(p));
        }
        return halfspace_reconstruction(VPolytope::from_points(n, pts));
    }
    fail(ErrorKind::InvalidInput, "polytope JSON needs \"facets\" or \"vertices\"");
}

nlohmann::json polytope_to_json(const HPolytope& p) {
    json facets = json::array();
    for (const auto& h : p.facets()) {
        json normal = json::array();
        for (const auto& c : h.normal) normal.push_back(c.convert_to<long long>());
        facets.push_back({{"normal", normal}, {"offset", rational_json(h.offset)}});
    }
    json verts = json::array();
    for (const auto& v : p.vertices()) verts.push_back(vector_json(v));
    return {{"dim", p.dim()}, {"facets", facets}, {"vertices", verts}};
}

HPolytope load_polytope_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(ErrorKind::InvalidInput, path + ": " + e.what());
    }
    return polytope_from_json(j);
}

HPolytope catalog_polytope(const std::string& name) {
    const auto colon = name.find(':');
    const std::string key = name.substr(0, colon);
    const std::vector<Rational> args = colon == std::string::npos ? std::vector<Rational>{} : split_params(name.substr(colon + 1));
    auto need = [&](std::size_t k) {
        if (args.size() != k) fail(ErrorKind::InvalidInput, "catalog entry " + key + " takes " + std::to_string(k) + " parameter(s)");
    };
    if (key == "square") {
        need(0);
        return HPolytope::box({0, 0}, {1, 1});
    }
    if (key == "simplex2" || key == "2simplex2") {
        need(0);
        const Rational s = key == "simplex2" ? 1 : 2;
        return HPolytope::from_halfspaces(2, std::vector<Halfspace>{{{1, 0}, 0}, {{0, 1}, 0}, {{-1, -1}, -s}});
    }
    if (key == "triangle_bad") {
        need(0);
        return halfspace_reconstruction(VPolytope::from_points(2, {{0, 0}, {1, 0}, {0, 2}}));
    }
    if (key == "pentagon") {
        need(1);
        return pentagon_polytope(args[0]);
    }
    if (key == "rect") {
        need(2);
        return HPolytope::box({0, 0}, {args[0], args[1]});
    }
    if (key == "box") {
        if (args.empty()) fail(ErrorKind::InvalidInput, "box needs side lengths");
        return HPolytope::box(RVector(args.size(), Rational(0)), args);
    }
    if (key == "dilation") {
        need(1);
        return HPolytope::box({0, 0}, {args[0], args[0]});
    }
    if (key == "segment") {
        need(1);
        return HPolytope::box({0}, {args[0]});
    }
    fail(ErrorKind::InvalidInput, "unknown catalog polytope '" + name + "'");
}

HPolytope resolve_polytope(const std::string& name_or_path) {
    if (std::filesystem::exists(name_or_path)) return load_polytope_file(name_or_path);
#ifdef TORICGH_CATALOG_DIR
    const std::filesystem::path shipped = std::filesystem::path(TORICGH_CATALOG_DIR) / name_or_path;
    if (std::filesystem::exists(shipped)) return load_polytope_file(shipped.string());
#endif
    return catalog_polytope(name_or_path);
}

}  // namespace toricgh
