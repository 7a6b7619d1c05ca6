#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "smatch/solver.hpp"

namespace smatch {

struct MatchParams {
    int k = 5;
    int h_max = 3;
    /// Affinity bandwidth; unset means the median positive cost of each level.
    std::optional<double> sigma;
    /// Multiplier on the median when sigma is unset.
    double sigma_scale = 0.25;
    double elim_quantile = 0.1;
    double unmatched_threshold = 1e-3;
    std::uint64_t seed = 0;

    /// Target candidates kept per simplex on each side (0 keeps every pair).
    int candidates_per_simplex = 10;
    /// Coupling strength of induced face costs, as a multiple of the mean positive
    /// descriptor distance of the receiving level.
    double coupling = 0.5;
    /// Lower bound on an induced seed, as a multiple of the same mean (<= 0).
    double seed_floor = -4.0;
    /// Pairwise-exchange refinement sweeps after each greedy discretisation.
    int refine_passes = 20;
    /// Re-solves after adding facet-neighbour pairs of matched simplices as candidates.
    int expansion_rounds = 0;
    /// A face with matched cofaces may only pair within the facets of their partners.
    bool restrict_to_support = false;
    bool keep_cost_matrices = false;

    void validate() const;
};

nlohmann::json to_json(const MatchParams& params);
MatchParams match_params_from_json(const nlohmann::json& j);

/// Support counts of facet pairs under matched cofaces, keyed by (i, i').
using FaceSupport = std::map<std::pair<int, int>, int>;

/// Every facet pairing of every matched p-simplex pair, counted once per matched coface.
FaceSupport count_face_support(const LevelAssignment& assignment, const BoundaryMatrix& src_boundary,
                               const BoundaryMatrix& tgt_boundary);

/// Seed over (p-1)-simplex pairs: -lambda * support, floored at `floor`.
PairCosts induce_face_costs(const LevelAssignment& assignment, const BoundaryMatrix& src_boundary,
                            const BoundaryMatrix& tgt_boundary, double lambda, double floor);

/// Facet pairs fixed before the next level is solved: among the `quantile` lowest
/// seeded costs, those whose support is a strict unique maximum for both the source
/// and the target facet.
std::vector<std::pair<int, int>> eliminate_settled(const FaceSupport& support, const PairCosts& seeded_costs,
                                                   double quantile);

/// Vertex correspondences voted by matched edges. Each edge (u,v) -> (u',v') votes
/// for the endpoint orientation with the smaller summed vertex-descriptor distance,
/// half a vote each way on a tie. Pairs are accepted greedily by votes, ties going to
/// the smaller source id then the smaller target id. Returns landmark-id pairs.
std::vector<std::pair<int, int>> vertex_assignment(const LevelAssignment& edges, const SkeletonComplex& src,
                                                   const SkeletonComplex& tgt,
                                                   const std::vector<AffineDescriptor>& src_vertex_desc,
                                                   const std::vector<AffineDescriptor>& tgt_vertex_desc);

struct LevelDiagnostics {
    int p = 0;
    bool skipped = false;
    int src_simplices = 0;
    int tgt_simplices = 0;
    int candidates = 0;
    int eliminated = 0;
    int matched = 0;
    double sigma = 0.0;
    double lambda = 0.0;
    bool converged = true;
    int iterations = 0;
    double seconds = 0.0;
};

struct MatchingResult {
    MatchParams params;
    /// Dimension -> assignment of simplex indices.
    std::map<int, LevelAssignment> per_level;
    /// Landmark-id pairs (source, target).
    std::vector<std::pair<int, int>> vertex_map;
    double objective_total = 0.0;
    std::vector<LevelDiagnostics> diagnostics;
    /// Filled only when params.keep_cost_matrices is set.
    std::map<int, LevelCostMatrix> cost_matrices;
};

MatchingResult match_complexes(const SkeletonComplex& src, const SkeletonComplex& tgt, const MatchParams& params);

/// Result file: {params, per_level: [{p, pairs: [[src ids], [tgt ids], cost]}], vertex_map,
/// objective_total, diagnostics}.
nlohmann::json result_to_json(const MatchingResult& result, const SkeletonComplex& src, const SkeletonComplex& tgt);

/// The parts of a result file that can be read back without the complexes.
struct ResultFile {
    MatchParams params;
    struct Pair {
        std::vector<int> src;
        std::vector<int> tgt;
        double cost = 0.0;
    };
    std::map<int, std::vector<Pair>> per_level;
    std::vector<std::pair<int, int>> vertex_map;
    double objective_total = 0.0;
};

ResultFile result_from_json(const nlohmann::json& j);

}  // namespace smatch
