#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smatch/complex.hpp"

namespace smatch {

/// Landmarks on one manifold. `edges`, when present, replaces the k-NN graph rule
/// (noise-perturbed graphs are stored this way); pairs hold landmark ids.
struct LandmarkSet {
    Manifold manifold = Manifold::sphere(1.0);
    std::vector<SurfacePoint> points;
    std::optional<std::vector<std::pair<int, int>>> edges;
};

/// Partial injection of source ids into target ids.
struct GroundTruth {
    std::vector<std::pair<int, int>> pairs;
};

nlohmann::json manifold_to_json(const Manifold& m);
Manifold manifold_from_json(const nlohmann::json& j);

nlohmann::json landmarks_to_json(const LandmarkSet& set);
/// Throws ParseError on schema problems, OffManifold when points leave the surface.
LandmarkSet landmarks_from_json(const nlohmann::json& j);

LandmarkSet load_landmarks(const std::string& path);
void save_landmarks(const std::string& path, const LandmarkSet& set);

nlohmann::json ground_truth_to_json(const GroundTruth& gt);
GroundTruth ground_truth_from_json(const nlohmann::json& j);
GroundTruth load_ground_truth(const std::string& path);
void save_ground_truth(const std::string& path, const GroundTruth& gt);

/// Identity pairs (id, id) for every point of the set.
GroundTruth identity_ground_truth(const LandmarkSet& set);

/// Reads a JSON document, reporting line/column on syntax errors.
nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

/// Throws OffManifold with every offending id; ParseError on duplicate ids.
void validate_landmarks(const LandmarkSet& set);

/// Geodesic graph of the set: k-NN rule, or the stored edge list when present.
GeodesicGraph landmark_graph(const LandmarkSet& set, int k);

}  // namespace smatch
