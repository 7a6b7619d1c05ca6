#pragma once

#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "smatch/descriptor.hpp"

namespace smatch {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// A candidate correspondence between simplex `src` of K and `tgt` of K'.
struct CandidatePair {
    int src = 0;
    int tgt = 0;
    auto operator<=>(const CandidatePair&) const = default;
};

/// Additive per-pair cost adjustments, keyed by (src, tgt) simplex indices.
using PairCosts = std::map<std::pair<int, int>, double>;

/// Quadratic cost of one level over candidate pairs of p-simplices.
///
/// The assignment variable lives on p-simplex pairs. The diagonal entry of pair
/// (k,k') carries the p-simplex descriptor distance (plus any carried seed); the
/// entry between (k,k') and (l,l') carries the descriptor distance of facets
/// (i,i') when sigma_k and sigma_l share facet tau_i and sigma'_k' and sigma'_l'
/// share tau'_i'. Every other entry is structurally zero. Entries that are stored
/// stay stored even when their value is 0.
struct LevelCostMatrix {
    int p = 0;
    int n_src = 0;
    int n_tgt = 0;
    std::vector<CandidatePair> pairs;
    /// Symmetric, pairs.size() square.
    SparseMatrix entries;
    /// Facet distances used by off-diagonal entries, keyed by (i, i').
    PairCosts facet_costs;

    double diagonal(int a) const { return entries.coeff(a, a); }
    int index_of(int src, int tgt) const;
};

/// All n_src * n_tgt pairs in lexicographic order.
std::vector<CandidatePair> all_pairs(int n_src, int n_tgt);

LevelCostMatrix build_cost_matrix(const BoundaryMatrix& src_boundary, const BoundaryMatrix& tgt_boundary,
                                  const LevelDescriptors& src_desc, const LevelDescriptors& tgt_desc,
                                  std::vector<CandidatePair> candidates = {},
                                  const PairCosts* carried = nullptr);

/// Gaussian kernel exp(-c^2 / sigma^2) on every stored entry.
SparseMatrix cost_to_affinity(const LevelCostMatrix& costs, double sigma);

/// Median of the strictly positive stored costs, or 1 when there are none.
double median_positive_cost(const LevelCostMatrix& costs);

struct SpectralOptions {
    double tolerance = 1e-9;
    int max_iterations = 1000;
    /// Pairs scoring below this fraction of the best score stay unmatched.
    double relative_threshold = 1e-3;
    /// Sweeps of pairwise-exchange refinement after the greedy pass (0 disables).
    int refine_passes = 20;
};

struct SpectralResult {
    /// Indices into the candidate list, in acceptance order.
    std::vector<int> selected;
    Eigen::VectorXd scores;
    bool converged = true;
    /// Largest iteration count of any component in any round.
    int iterations = 0;
    int rounds = 0;
};

/// Principal eigenvector of W by power iteration followed by greedy one-to-one
/// discretisation. Each connected component of W is iterated on its own and its
/// eigenvector is scaled so its largest entry equals the component's eigenvalue.
/// Discretisation runs in rounds: after each greedy pass the still-compatible
/// candidates are re-solved, until a round's best score drops below the relative
/// threshold of the first round's best.
SpectralResult spectral_match(const SparseMatrix& affinity, std::span<const CandidatePair> pairs,
                              const SpectralOptions& options = {});

struct MatchedPair {
    int src = 0;
    int tgt = 0;
    double cost = 0.0;
};

/// Partial injection between the p-simplices of K and K'.
struct LevelAssignment {
    int p = 0;
    std::vector<MatchedPair> pairs;
    double objective = 0.0;
};

/// vec(X)^T L vec(X) for the selected candidate indices. Each pair's cost is its row
/// of L restricted to the selection, so the pair costs sum to the objective.
LevelAssignment evaluate_assignment(const LevelCostMatrix& costs, std::span<const int> selected);

struct LevelSolve {
    LevelAssignment assignment;
    SpectralResult spectral;
    double sigma = 1.0;
};

/// Converts costs to affinities, runs spectral_match over the candidates that are not
/// `fixed`, then evaluates the union of the solution and the fixed pairs.
LevelSolve solve_level(const LevelCostMatrix& costs, std::optional<double> sigma,
                       std::span<const int> fixed = {}, const SpectralOptions& options = {});

}  // namespace smatch
