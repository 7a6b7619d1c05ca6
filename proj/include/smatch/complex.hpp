#pragma once

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "smatch/geometry.hpp"

namespace smatch {

/// Sorted vertex indices of a simplex (dimension = size - 1).
using Simplex = std::vector<int>;
using Edge = std::pair<int, int>;

/// Landmark graph G = (P, E) with its geodesic distance matrix.
///
/// Edges hold vertex *indices* into `vertices` (first < second), sorted ascending.
struct GeodesicGraph {
    std::vector<SurfacePoint> vertices;
    std::vector<Edge> edges;
    int k = 0;
    Eigen::MatrixXd distances;

    std::size_t vertex_count() const { return vertices.size(); }
    bool has_edge(int u, int v) const;
    /// Adjacency lists indexed by vertex index.
    std::vector<std::vector<int>> adjacency() const;
    int max_degree() const;
};

/// k nearest neighbours of every vertex, inclusive of the vertex itself. Ties in
/// distance are broken by ascending vertex id.
std::vector<std::vector<int>> knn_sets(const GeodesicGraph& graph, int k);

/// Connects u and v whenever their k-neighbourhoods intersect.
GeodesicGraph build_graph(std::span<const SurfacePoint> points, const Manifold& manifold, int k);

/// Same edge rule over a precomputed distance matrix.
GeodesicGraph build_graph(std::vector<SurfacePoint> points, Eigen::MatrixXd distances, int k);

/// Replaces the edge set, canonicalising it (sorted, no duplicates, no loops).
GeodesicGraph with_edges(const GeodesicGraph& graph, std::vector<Edge> edges);

/// Column-sparse boundary matrix: column j lists the row indices of the facets of
/// the j-th p-simplex, in the order obtained by deleting vertex 0, 1, ..., p.
struct BoundaryMatrix {
    int p = 0;
    int rows = 0;
    std::vector<std::vector<int>> columns;

    int cols() const { return static_cast<int>(columns.size()); }
    Eigen::MatrixXi dense() const;
};

/// Graph-induced complex truncated at dimension h.
struct SkeletonComplex {
    std::vector<SurfacePoint> vertices;
    /// simplices[d] holds the d-simplices in lexicographic order.
    std::vector<std::vector<Simplex>> simplices;
    /// boundary[p - 1] is M_p for p = 1..h.
    std::vector<BoundaryMatrix> boundary;
    int h = 0;

    std::size_t count(int d) const {
        return d >= 0 && d < static_cast<int>(simplices.size()) ? simplices[d].size() : 0;
    }
    const BoundaryMatrix& boundary_matrix(int p) const { return boundary.at(p - 1); }
    /// Index of a sorted simplex in simplices[d], or -1.
    int index_of(const Simplex& s) const;
    std::vector<int> ids(const Simplex& s) const;
    Vec3 barycenter_of(const Simplex& s) const;
    std::size_t total_simplices() const;
};

/// Every clique of size <= max_size, each as a sorted vertex list. Maximal cliques
/// come from Bron-Kerbosch with pivoting; their subsets are expanded and deduplicated.
std::vector<std::vector<Simplex>> enumerate_cliques(const std::vector<std::vector<int>>& adjacency,
                                                    int max_size);

SkeletonComplex build_complex(const GeodesicGraph& graph, int h_max = 3);

/// Upper bound on the number of cliques of order 1..h in a graph with n vertices,
/// m edges and maximum degree delta.
double clique_bound(long n, long m, int delta, int h);

/// {"0": [[ids...], ...], "1": ...} using landmark ids.
nlohmann::json complex_to_json(const SkeletonComplex& complex);

}  // namespace smatch
