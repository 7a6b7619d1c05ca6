#pragma once

#include <cstdint>

#include "smatch/landmark_io.hpp"

namespace smatch {

/// n points drawn area-uniformly on the manifold by rejection, pairwise geodesic
/// distance >= min_separation, ids 0..n-1. The plane is sampled on [-1,1]^2.
/// Throws InfeasiblePacking once `attempts_per_point * n` draws are exhausted.
LandmarkSet synth_landmarks(const Manifold& manifold, int n, double min_separation, std::uint64_t seed,
                            int attempts_per_point = 2000);

}  // namespace smatch
