#include "smatch/landmark_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace smatch {

namespace {

template <class F>
auto field(const char* what, F&& f) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

}  // namespace

nlohmann::json manifold_to_json(const Manifold& m) {
    nlohmann::json j{{"kind", std::string(to_string(m.kind()))}};
    const auto& p = m.params();
    switch (m.kind()) {
        case ManifoldKind::Sphere: j["radius"] = p[0]; break;
        case ManifoldKind::Cylinder:
        case ManifoldKind::Cone:
            j["radius"] = p[0];
            j["height"] = p[1];
            break;
        case ManifoldKind::Ellipsoid:
            j["a"] = p[0];
            j["b"] = p[1];
            j["c"] = p[2];
            j["mesh_resolution"] = m.mesh_resolution();
            break;
        case ManifoldKind::Plane: break;
    }
    return j;
}

Manifold manifold_from_json(const nlohmann::json& j) {
    const std::string kind = field("manifold.kind", [&] { return j.at("kind").get<std::string>(); });
    auto num = [&](const char* key) {
        return field((std::string("manifold.") + key).c_str(), [&] { return j.at(key).get<double>(); });
    };
    try {
        switch (manifold_kind_from_string(kind)) {
            case ManifoldKind::Sphere: return Manifold::sphere(num("radius"));
            case ManifoldKind::Cylinder: return Manifold::cylinder(num("radius"), num("height"));
            case ManifoldKind::Cone: return Manifold::cone(num("radius"), num("height"));
            case ManifoldKind::Ellipsoid:
                return Manifold::ellipsoid(num("a"), num("b"), num("c"), j.value("mesh_resolution", 4));
            case ManifoldKind::Plane: return Manifold::plane();
        }
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("manifold: ") + e.what());
    }
    throw ParseError("manifold: unknown kind " + kind);
}

nlohmann::json landmarks_to_json(const LandmarkSet& set) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : set.points) pts.push_back({{"id", p.id}, {"xyz", {p.xyz.x(), p.xyz.y(), p.xyz.z()}}});
    nlohmann::json j{{"manifold", manifold_to_json(set.manifold)}, {"points", std::move(pts)}};
    if (set.edges) {
        nlohmann::json e = nlohmann::json::array();
        for (const auto& [a, b] : *set.edges) e.push_back({a, b});
        j["edges"] = std::move(e);
    }
    return j;
}

LandmarkSet landmarks_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("landmark file: top level must be an object");
    LandmarkSet set;
    set.manifold = manifold_from_json(field("manifold", [&] { return j.at("manifold"); }));
    const auto& pts = field("points", [&]() -> const nlohmann::json& { return j.at("points"); });
    if (!pts.is_array()) throw ParseError("points: must be an array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::string where = "points[" + std::to_string(i) + "]";
        SurfacePoint p;
        p.id = field((where + ".id").c_str(), [&] { return pts[i].at("id").get<int>(); });
        const auto xyz = field((where + ".xyz").c_str(), [&] { return pts[i].at("xyz").get<std::vector<double>>(); });
        if (xyz.size() != 3) throw ParseError(where + ".xyz: expected 3 coordinates");
        p.xyz = Vec3(xyz[0], xyz[1], xyz[2]);
        set.points.push_back(p);
    }
    if (j.contains("edges"))
        set.edges = field("edges", [&] { return j.at("edges").get<std::vector<std::pair<int, int>>>(); });
    validate_landmarks(set);
    return set;
}

void validate_landmarks(const LandmarkSet& set) {
    std::set<int> ids;
    for (const auto& p : set.points)
        if (!ids.insert(p.id).second) throw ParseError("points: duplicate id " + std::to_string(p.id));
    if (set.edges)
        for (const auto& [a, b] : *set.edges)
            if (!ids.contains(a) || !ids.contains(b) || a == b)
                throw ParseError("edges: bad pair [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    std::vector<int> off;
    for (const auto& p : set.points)
        if (!p.xyz.allFinite() || !set.manifold.contains(p.xyz)) off.push_back(p.id);
    if (!off.empty()) throw OffManifold(off);
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Translate the byte offset into a line number.
        const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        throw ParseError(path + ":" + std::to_string(line) + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << j.dump(2) << '\n';
}

LandmarkSet load_landmarks(const std::string& path) {
    try {
        return landmarks_from_json(read_json_file(path));
    } catch (const ParseError& e) {
        const std::string what = e.what();
        if (what.rfind(path, 0) == 0 || what.rfind("cannot", 0) == 0) throw;
        throw ParseError(path + ": " + what);
    }
}

void save_landmarks(const std::string& path, const LandmarkSet& set) { write_json_file(path, landmarks_to_json(set)); }

nlohmann::json ground_truth_to_json(const GroundTruth& gt) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [a, b] : gt.pairs) pairs.push_back({a, b});
    return {{"pairs", std::move(pairs)}};
}

GroundTruth ground_truth_from_json(const nlohmann::json& j) {
    GroundTruth gt;
    gt.pairs = field("pairs", [&] { return j.at("pairs").get<std::vector<std::pair<int, int>>>(); });
    std::set<int> src, tgt;
    for (const auto& [a, b] : gt.pairs)
        if (!src.insert(a).second || !tgt.insert(b).second)
            throw ParseError("pairs: not an injection at [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    return gt;
}

GroundTruth load_ground_truth(const std::string& path) { return ground_truth_from_json(read_json_file(path)); }

void save_ground_truth(const std::string& path, const GroundTruth& gt) {
    write_json_file(path, ground_truth_to_json(gt));
}

GroundTruth identity_ground_truth(const LandmarkSet& set) {
    GroundTruth gt;
    for (const auto& p : set.points) gt.pairs.emplace_back(p.id, p.id);
    return gt;
}

GeodesicGraph landmark_graph(const LandmarkSet& set, int k) {
    GeodesicGraph g = build_graph(set.points, set.manifold, k);
    if (!set.edges) return g;
    std::map<int, int> index;
    for (std::size_t i = 0; i < set.points.size(); ++i) index[set.points[i].id] = static_cast<int>(i);
    std::vector<Edge> edges;
    for (const auto& [a, b] : *set.edges) edges.emplace_back(index.at(a), index.at(b));
    return with_edges(g, std::move(edges));
}

}  // namespace smatch
