#pragma once

#include <span>
#include <vector>

#include "smatch/complex.hpp"

namespace smatch {

/// Adjacency lists for the simplices of one boundary matrix M_p.
///
/// Two simplices are adjacent when they share at least one vertex. "Upper" are the
/// p-simplices (columns of M_p), "lower" the (p-1)-simplices (rows). No list contains
/// the simplex it belongs to.
struct NeighborhoodIndex {
    int p = 0;
    std::vector<std::vector<int>> upper_to_upper;
    std::vector<std::vector<int>> upper_to_lower;
    std::vector<std::vector<int>> lower_to_lower;
    std::vector<std::vector<int>> lower_to_upper;
};

NeighborhoodIndex build_neighborhoods(const SkeletonComplex& complex, int p);

/// Affine weights of one simplex over the barycentres of its neighbourhood.
///
/// `support` holds positions in the (rows + columns) layout of M_p: a (p-1)-simplex i
/// sits at i and a p-simplex j at rows + j. `canonical` is the weight profile sorted
/// descending, which is what cross-complex comparisons use.
struct AffineDescriptor {
    int dimension = 0;
    std::vector<int> support;
    std::vector<double> weights;
    std::vector<double> canonical;
    double residual = 0.0;

    /// False for the sentinel given to simplices without neighbours.
    bool valid() const { return !weights.empty(); }
};

/// Weights w minimising |sum w_i b_i - target| subject to sum w_i = 1, taking the
/// minimum-norm solution when the minimiser is not unique.
AffineDescriptor affine_weights(const Vec3& target, std::span<const Vec3> neighbor_barycenters);

/// Euclidean distance between canonical weight profiles, the shorter zero-padded.
double descriptor_distance(const AffineDescriptor& a, const AffineDescriptor& b);

/// Descriptors of every p-simplex (upper) and (p-1)-simplex (lower) of M_p.
struct LevelDescriptors {
    int p = 0;
    std::vector<AffineDescriptor> upper;
    std::vector<AffineDescriptor> lower;
};

LevelDescriptors compute_descriptors(const SkeletonComplex& complex, int p);
LevelDescriptors compute_descriptors(const SkeletonComplex& complex, const NeighborhoodIndex& nbrs);

}  // namespace smatch
