#pragma once

#include <optional>
#include <string>

#include "smatch/landmark_io.hpp"

namespace smatch {

/// Side-by-side orthographic views (x-z for curved surfaces, x-y for the plane).
/// Matches are segments: class "correct" (green) when the pair is in `gt`,
/// class "incorrect" (red) otherwise; every point is a dot, unmatched ones hollow.
std::string render_svg(const std::vector<std::pair<int, int>>& vertex_map, const LandmarkSet& src,
                       const LandmarkSet& tgt, const std::optional<GroundTruth>& gt);

}  // namespace smatch
