#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "smatch/evaluate.hpp"
#include "smatch/perturb.hpp"
#include "smatch/render.hpp"
#include "smatch/sweep.hpp"
#include "smatch/synth.hpp"

using namespace smatch;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("smatch_test_" + name)).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream(path) << text;
}

int count_of(const std::string& text, const std::string& needle) {
    int n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::set<Edge> edge_set(const std::vector<Edge>& e) { return {e.begin(), e.end()}; }

}  // namespace

TEST_CASE("minimal landmark file loads") {
    const auto path = temp_path("one.json");
    write_text(path, R"({"manifold": {"kind": "sphere", "radius": 1.0}, "points": [{"id": 7, "xyz": [0, 0, 1]}]})");
    const auto set = load_landmarks(path);
    REQUIRE(set.points.size() == 1);
    CHECK(set.points[0].id == 7);
    CHECK(set.manifold == Manifold::sphere(1.0));
}

TEST_CASE("landmark files round-trip for every manifold kind") {
    const Manifold kinds[] = {Manifold::sphere(2.0), Manifold::cylinder(1.0, 3.0), Manifold::cone(1.0, 2.0),
                              Manifold::ellipsoid(1.0, 1.5, 2.0, 2), Manifold::plane()};
    int i = 0;
    for (const auto& m : kinds) {
        auto set = synth_landmarks(m, m.kind() == ManifoldKind::Sphere ? 50 : 12, 0.05, 3);
        if (m.kind() == ManifoldKind::Cone) set.edges = std::vector<std::pair<int, int>>{{0, 1}, {2, 3}};
        const auto path = temp_path("rt" + std::to_string(i++) + ".json");
        save_landmarks(path, set);
        const auto back = load_landmarks(path);
        CHECK(back.manifold == set.manifold);
        REQUIRE(back.points.size() == set.points.size());
        for (std::size_t j = 0; j < set.points.size(); ++j) {
            CHECK(back.points[j].id == set.points[j].id);
            CHECK(back.points[j].xyz == set.points[j].xyz);
        }
        CHECK(back.edges == set.edges);
    }
}

TEST_CASE("off-manifold points are reported by id") {
    const auto path = temp_path("off.json");
    write_text(path, R"({"manifold": {"kind": "sphere", "radius": 1.0},
        "points": [{"id": 1, "xyz": [1, 0, 0]}, {"id": 42, "xyz": [2, 0, 0]}]})");
    try {
        load_landmarks(path);
        FAIL("expected OffManifold");
    } catch (const OffManifold& e) {
        CHECK(e.ids() == std::vector<int>{42});
        CHECK(std::string(e.what()).find("42") != std::string::npos);
    }
}

TEST_CASE("parse errors carry line or field context") {
    const auto path = temp_path("bad.json");
    write_text(path, "{\n  \"manifold\": {\"kind\": \"sphere\", \"radius\": 1.0},\n  \"points\": [\n  oops\n]}");
    try {
        load_landmarks(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(":4:") != std::string::npos);
    }
    write_text(path, R"({"manifold": {"kind": "sphere", "radius": 1.0}, "points": [{"id": 1}]})");
    try {
        load_landmarks(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("points[0].xyz") != std::string::npos);
    }
    write_text(path, R"({"manifold": {"kind": "sphere", "radius": 1.0},
        "points": [{"id": 1, "xyz": [1, 0, 0]}, {"id": 1, "xyz": [0, 1, 0]}]})");
    CHECK_THROWS_AS(load_landmarks(path), ParseError);
    CHECK_THROWS_AS(load_landmarks(temp_path("missing.json")), ParseError);
}

TEST_CASE("ground truth files round-trip and must be injective") {
    const auto path = temp_path("gt.json");
    GroundTruth gt;
    gt.pairs = {{0, 3}, {1, 1}, {2, 0}};
    save_ground_truth(path, gt);
    CHECK(load_ground_truth(path).pairs == gt.pairs);
    write_text(path, R"({"pairs": [[0, 1], [2, 1]]})");
    CHECK_THROWS_AS(load_ground_truth(path), ParseError);
}

TEST_CASE("synthetic sets") {
    const auto sphere = Manifold::sphere(1.0);
    SUBCASE("single point") {
        const auto s = synth_landmarks(sphere, 1, 0.1, 1);
        REQUIRE(s.points.size() == 1);
        CHECK(sphere.contains(s.points[0].xyz));
    }
    SUBCASE("minimum separation holds pairwise") {
        const auto s = synth_landmarks(sphere, 50, 0.1, 9);
        REQUIRE(s.points.size() == 50);
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            CHECK(sphere.contains(s.points[i].xyz));
            CHECK(s.points[i].id == static_cast<int>(i));
            for (std::size_t j = i + 1; j < s.points.size(); ++j)
                CHECK(sphere.geodesic_distance(s.points[i], s.points[j]) >= 0.1);
        }
    }
    SUBCASE("deterministic in the seed") {
        const auto a = synth_landmarks(sphere, 30, 0.1, 5), b = synth_landmarks(sphere, 30, 0.1, 5);
        for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i].xyz == b.points[i].xyz);
    }
    SUBCASE("every kind lands on its manifold") {
        for (const auto& m : {Manifold::cylinder(1.0, 2.0), Manifold::cone(1.0, 2.0),
                              Manifold::ellipsoid(1.0, 2.0, 1.5, 2), Manifold::plane()}) {
            const auto s = synth_landmarks(m, 20, 0.05, 2);
            for (const auto& p : s.points) CHECK(m.contains(p.xyz));
        }
    }
    SUBCASE("infeasible packing is detected") {
        CHECK_THROWS_AS(synth_landmarks(sphere, 50, 2.0, 1, 20), InfeasiblePacking);
    }
}

TEST_CASE("rotation by 90 degrees about z") {
    LandmarkSet set;
    set.points = {{0, Vec3(1, 0, 0)}};
    PerturbationSpec spec;
    spec.kind = PerturbationSpec::Kind::Rotate;
    spec.angle_deg = 90.0;
    const auto out = apply_perturbation(set, spec);
    CHECK((out.set.points[0].xyz - Vec3(0, 1, 0)).norm() < 1e-12);
    CHECK(out.ground_truth.pairs == std::vector<std::pair<int, int>>{{0, 0}});
}

TEST_CASE("rotating a cylinder off its axis leaves the manifold") {
    auto set = synth_landmarks(Manifold::cylinder(1.0, 2.0), 10, 0.05, 1);
    PerturbationSpec spec;
    spec.kind = PerturbationSpec::Kind::Rotate;
    spec.angle_deg = 30.0;
    spec.axis = Vec3::UnitX();
    CHECK_THROWS_AS(apply_perturbation(set, spec), OffManifold);
}

TEST_CASE("scale and shear re-project onto a fitted manifold of the same kind") {
    const auto set = synth_landmarks(Manifold::sphere(1.0), 40, 0.1, 4);
    PerturbationSpec spec;
    spec.kind = PerturbationSpec::Kind::Scale;
    spec.scale = Vec3(2.0, 2.0, 2.0);
    const auto scaled = apply_perturbation(set, spec);
    CHECK(scaled.set.manifold.kind() == ManifoldKind::Sphere);
    CHECK(scaled.set.manifold.radius() == doctest::Approx(2.0));
    spec.kind = PerturbationSpec::Kind::Shear;
    spec.shear = 0.5;
    const auto sheared = apply_perturbation(set, spec);
    for (const auto& p : sheared.set.points) CHECK(sheared.set.manifold.contains(p.xyz));
    const auto ell = synth_landmarks(Manifold::ellipsoid(1.0, 1.0, 2.0, 2), 15, 0.05, 4);
    spec.kind = PerturbationSpec::Kind::Scale;
    spec.scale = Vec3(0.5, 1.0, 1.0);
    const auto squashed = apply_perturbation(ell, spec);
    CHECK(squashed.set.manifold.semi_axes().isApprox(Vec3(0.5, 1.0, 2.0)));
}

TEST_CASE("noise model I at p=0 and p=1") {
    const std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 3}};
    CHECK(noise_model_one(5, edges, 0.0, 1) == edges);
    const auto complement = noise_model_one(5, edges, 1.0, 1);
    CHECK(complement.size() == 10 - edges.size());
    for (const auto& e : edges) CHECK_FALSE(edge_set(complement).contains(e));
}

TEST_CASE("noise models yield simple graphs and are deterministic") {
    const std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (const auto& g : {noise_model_one(8, edges, 0.3, seed), noise_model_two(8, edges, 0.3, 0.2, seed)}) {
            for (const auto& [a, b] : g) {
                CHECK(a < b);
                CHECK(b < 8);
            }
            CHECK(edge_set(g).size() == g.size());
        }
        CHECK(noise_model_one(8, edges, 0.3, seed) == noise_model_one(8, edges, 0.3, seed));
    }
    // Model II with q=0 only removes; with p=0 only adds.
    const auto drop = edge_set(noise_model_two(8, edges, 0.5, 0.0, 3));
    for (const auto& e : drop) CHECK(edge_set(edges).contains(e));
    const auto add = edge_set(noise_model_two(8, edges, 0.0, 0.5, 3));
    for (const auto& e : edges) CHECK(add.contains(e));
}

TEST_CASE("noise perturbation stores the new edges by id") {
    const auto set = synth_landmarks(Manifold::sphere(1.0), 30, 0.1, 2);
    PerturbationSpec spec;
    spec.kind = PerturbationSpec::Kind::NoiseI;
    spec.p = 0.0;
    const auto same = apply_perturbation(set, spec);
    REQUIRE(same.set.edges.has_value());
    CHECK(landmark_graph(same.set, 5).edges == landmark_graph(set, 5).edges);
}

TEST_CASE("MCAR removal") {
    const auto set = synth_landmarks(Manifold::sphere(1.0), 50, 0.1, 6);
    PerturbationSpec spec;
    spec.kind = PerturbationSpec::Kind::Mcar;
    spec.fraction = 0.0;
    CHECK(apply_perturbation(set, spec).set.points.size() == 50);
    spec.fraction = 0.2;
    spec.seed = 3;
    const auto out = apply_perturbation(set, spec);
    CHECK(out.set.points.size() < 50);
    for (const auto& [a, b] : out.ground_truth.pairs) {
        CHECK(a == b);
        CHECK(a < 50);
    }
    CHECK(out.ground_truth.pairs.size() == out.set.points.size());
    spec.exact_count = true;
    CHECK(apply_perturbation(set, spec).set.points.size() == 40);
    spec.fraction = 1.0;
    CHECK_THROWS_AS(apply_perturbation(set, spec), InvalidArgument);
}

TEST_CASE("matching error arithmetic") {
    GroundTruth gt;
    for (int i = 0; i < 10; ++i) gt.pairs.emplace_back(i, i);
    std::vector<std::pair<int, int>> map;
    for (int i = 0; i < 10; ++i) map.emplace_back(i, i);
    CHECK(matching_error(map, gt).percent == 0.0);
    map[3].second = 4;
    map[4].second = 3;
    map.pop_back();
    const auto e = matching_error(map, gt);
    CHECK(e.correct == 7);
    CHECK(e.percent == doctest::Approx(30.0));
    map = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}, {6, 6}, {7, 7}, {8, 8}};
    CHECK(matching_error(map, gt).percent == doctest::Approx(10.0));
    CHECK_THROWS_AS(matching_error(map, GroundTruth{}), EmptyGroundTruth);
}

TEST_CASE("self-match of synthetic sets has zero error") {
    for (const auto& m : {Manifold::sphere(1.0), Manifold::cylinder(1.0, 2.0), Manifold::plane()}) {
        const auto set = synth_landmarks(m, 30, 0.05, 8);
        CHECK(matching_error(match_landmarks(set, set, MatchParams{}), identity_ground_truth(set)).percent == 0.0);
    }
}

TEST_CASE("sweep tables") {
    const nlohmann::json base = {{"manifold", {{"kind", "sphere"}, {"radius", 1.0}}}, {"n", 30}, {"min_sep", 0.1}, {"seed", 4}};
    auto rows = [](const std::string& csv) {
        std::vector<std::string> out;
        std::istringstream in(csv);
        for (std::string line; std::getline(in, line);) out.push_back(line);
        return out;
    };
    auto column = [](const std::string& row, int c) {
        std::istringstream in(row);
        std::string cell;
        for (int i = 0; i <= c; ++i) std::getline(in, cell, ',');
        return cell;
    };
    SUBCASE("a single cell equals a direct run") {
        auto cfg = base;
        cfg["perturbation"] = {{"kind", "noise1"}, {"p", 0.02}};
        const auto r = rows(run_sweep(cfg));
        REQUIRE(r.size() == 2);
        const auto set = synth_landmarks(Manifold::sphere(1.0), 30, 0.1, 4);
        PerturbationSpec spec;
        spec.kind = PerturbationSpec::Kind::NoiseI;
        spec.p = 0.02;
        spec.seed = 4;
        const auto noisy = apply_perturbation(set, spec);
        const auto err = matching_error(match_landmarks(noisy.set, set, MatchParams{}), noisy.ground_truth);
        CHECK(std::stod(column(r[1], 10)) == doctest::Approx(err.percent).epsilon(1e-9));
        CHECK(run_sweep(cfg) == run_sweep(cfg));
    }
    SUBCASE("radius rows agree") {
        auto cfg = base;
        cfg["grid"] = {{"radius", {1.0, 2.0}}};
        cfg["perturbation"] = {{"kind", "noise1"}, {"p", 0.02}};
        const auto r = rows(run_sweep(cfg));
        REQUIRE(r.size() == 3);
        CHECK(column(r[1], 10) == column(r[2], 10));
        CHECK(column(r[1], 8) == column(r[2], 8));
    }
    SUBCASE("k grid gives one row per value") {
        auto cfg = base;
        cfg["grid"] = {{"k", {4, 5, 6, 7}}};
        const auto r = rows(run_sweep(cfg));
        REQUIRE(r.size() == 5);
        for (int i = 1; i <= 4; ++i) {
            CHECK(column(r[i], 4) == std::to_string(3 + i));
            CHECK_FALSE(column(r[i], 10).empty());
        }
    }
}

TEST_CASE("SVG rendering") {
    const auto set = synth_landmarks(Manifold::sphere(1.0), 10, 0.1, 1);
    const auto gt = identity_ground_truth(set);
    SUBCASE("empty result has points only") {
        const auto svg = render_svg({}, set, set, gt);
        CHECK(count_of(svg, "<line class=") == 0);
        CHECK(count_of(svg, "<circle") == 20);
        CHECK(count_of(svg, "class=\"unmatched\"") == 20);
    }
    SUBCASE("identity is all green") {
        std::vector<std::pair<int, int>> map;
        for (const auto& p : set.points) map.emplace_back(p.id, p.id);
        const auto svg = render_svg(map, set, set, gt);
        CHECK(count_of(svg, "class=\"correct\"") == 10);
        CHECK(count_of(svg, "class=\"incorrect\"") == 0);
    }
    SUBCASE("one wrong pair is one red segment") {
        std::vector<std::pair<int, int>> map;
        for (int i = 0; i < 8; ++i) map.emplace_back(i, i);
        map.emplace_back(8, 9);
        const auto svg = render_svg(map, set, set, gt);
        CHECK(count_of(svg, "class=\"incorrect\"") == 1);
        CHECK(count_of(svg, "class=\"correct\"") == 8);
    }
}
