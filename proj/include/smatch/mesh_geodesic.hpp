#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace smatch {

/// Closest point on the ellipsoid (x/a)^2 + (y/b)^2 + (z/c)^2 = 1.
/// Points at the origin have no unique projection and raise DegeneratePoint.
Eigen::Vector3d closest_point_on_ellipsoid(const Eigen::Vector3d& axes, const Eigen::Vector3d& y);

/// Geodesic distances on an ellipsoid from a subdivided icosahedral mesh.
///
/// A query attaches both endpoints to the vertices around their nearest mesh vertex,
/// runs Dijkstra over mesh edges, and then shortens the resulting polyline on the
/// exact surface (repeated midpoint projection at increasing sampling density).
/// Queries are evaluated in a canonical endpoint order so d(p,q) == d(q,p) bitwise.
class GeodesicMesh {
public:
    GeodesicMesh(const Eigen::Vector3d& axes, int subdivisions);

    std::size_t vertex_count() const { return vertices_.size(); }
    const std::vector<Eigen::Vector3d>& vertices() const { return vertices_; }

    /// Length of the Dijkstra path only, without surface shortening.
    double graph_distance(const Eigen::Vector3d& p, const Eigen::Vector3d& q) const;

    double distance(const Eigen::Vector3d& p, const Eigen::Vector3d& q) const;

    Eigen::MatrixXd pairwise(std::span<const Eigen::Vector3d> points) const;

private:
    struct Arc {
        int to;
        double length;
    };
    struct Attachment {
        std::vector<int> vertices;
        std::vector<double> lengths;
    };
    struct Tree {
        std::vector<double> dist;
        std::vector<int> parent;
        std::vector<int> root;  // index into the source attachment, -1 for unreached
    };

    Attachment attach(const Eigen::Vector3d& p) const;
    Tree dijkstra(const Attachment& source) const;
    /// Best exit vertex of `tree` into `target` and the total graph length.
    std::pair<int, double> best_exit(const Tree& tree, const Attachment& target) const;
    std::vector<Eigen::Vector3d> trace(const Tree& tree, int exit, const Eigen::Vector3d& p,
                                       const Eigen::Vector3d& q) const;
    double shorten(std::vector<Eigen::Vector3d> path) const;
    double distance_ordered(const Eigen::Vector3d& p, const Eigen::Vector3d& q) const;

    Eigen::Vector3d axes_;
    std::vector<Eigen::Vector3d> vertices_;
    std::vector<std::vector<Arc>> adjacency_;
};

}  // namespace smatch
