#pragma once

#include "smatch/landmark_io.hpp"
#include "smatch/pipeline.hpp"

namespace smatch {

struct MatchingError {
    int correct = 0;
    int total = 0;
    double percent = 0.0;
};

/// 100 * (1 - correct / |gt|); unmatched ground-truth sources count as wrong.
MatchingError matching_error(const std::vector<std::pair<int, int>>& vertex_map, const GroundTruth& gt);
inline MatchingError matching_error(const MatchingResult& result, const GroundTruth& gt) {
    return matching_error(result.vertex_map, gt);
}

/// Builds both graphs and complexes, then matches them.
MatchingResult match_landmarks(const LandmarkSet& src, const LandmarkSet& tgt, const MatchParams& params);

}  // namespace smatch
