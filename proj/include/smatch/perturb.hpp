#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "smatch/landmark_io.hpp"

namespace smatch {

struct PerturbationSpec {
    enum class Kind { Rotate, Reflect, Scale, Shear, NoiseI, NoiseII, Mcar };
    Kind kind = Kind::Rotate;
    double angle_deg = 0.0;      // Rotate
    Vec3 axis = Vec3::UnitZ();   // Rotate
    int reflect_axis = 0;        // Reflect: coordinate negated
    Vec3 scale = Vec3::Ones();   // Scale
    double shear = 0.0;          // Shear: x[shear_axes.first] += shear * x[shear_axes.second]
    std::pair<int, int> shear_axes{0, 1};
    double p = 0.0;              // NoiseI flip / NoiseII drop probability
    double q = 0.0;              // NoiseII add probability
    double fraction = 0.0;       // Mcar
    bool exact_count = false;    // Mcar: remove exactly round(fraction * n) points
    int k = 5;                   // graph used by the noise models when the set has no edges
    std::uint64_t seed = 0;

    void validate() const;
};

PerturbationSpec::Kind perturbation_kind_from_string(std::string_view name);

struct Perturbed {
    LandmarkSet set;
    /// Original id -> perturbed id (identity on the survivors).
    GroundTruth ground_truth;
};

Perturbed apply_perturbation(const LandmarkSet& set, const PerturbationSpec& spec);

/// Noise models on an index-based edge list over n vertices. The result is simple,
/// undirected and sorted.
std::vector<Edge> noise_model_one(std::size_t n, const std::vector<Edge>& edges, double p, std::uint64_t seed);
std::vector<Edge> noise_model_two(std::size_t n, const std::vector<Edge>& edges, double p, double q,
                                  std::uint64_t seed);

/// Applies the linear map A to every point, then re-projects onto the best-fit
/// manifold of the same kind.
LandmarkSet linear_reproject(const LandmarkSet& set, const Eigen::Matrix3d& A);

/// Manifold and points scaled by s exactly (no re-projection needed).
LandmarkSet scale_instance(const LandmarkSet& set, double s);

}  // namespace smatch
