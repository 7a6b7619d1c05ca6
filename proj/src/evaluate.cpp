#include "smatch/evaluate.hpp"

#include <map>

namespace smatch {

MatchingError matching_error(const std::vector<std::pair<int, int>>& vertex_map, const GroundTruth& gt) {
    if (gt.pairs.empty()) throw EmptyGroundTruth();
    std::map<int, int> matched(vertex_map.begin(), vertex_map.end());
    MatchingError e;
    e.total = static_cast<int>(gt.pairs.size());
    for (const auto& [s, t] : gt.pairs) {
        auto it = matched.find(s);
        if (it != matched.end() && it->second == t) ++e.correct;
    }
    e.percent = 100.0 * (1.0 - static_cast<double>(e.correct) / static_cast<double>(e.total));
    return e;
}

MatchingResult match_landmarks(const LandmarkSet& src, const LandmarkSet& tgt, const MatchParams& params) {
    params.validate();
    const SkeletonComplex a = build_complex(landmark_graph(src, params.k), params.h_max);
    const SkeletonComplex b = build_complex(landmark_graph(tgt, params.k), params.h_max);
    return match_complexes(a, b, params);
}

}  // namespace smatch
