#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "smatch/errors.hpp"

namespace smatch {

using Vec3 = Eigen::Vector3d;

enum class ManifoldKind { Sphere, Cylinder, Cone, Ellipsoid, Plane };

std::string_view to_string(ManifoldKind kind);
ManifoldKind manifold_kind_from_string(std::string_view name);

class GeodesicMesh;

/// A landmark constrained to a manifold.
struct SurfacePoint {
    int id = 0;
    Vec3 xyz = Vec3::Zero();
};

/// Parametric surface with its geodesic metric.
///
/// Sphere: radius R centred at the origin.
/// Cylinder: radius R around the z axis, z in [0, H].
/// Cone: apex at (0,0,H), base circle of radius R at z = 0, lateral surface only.
/// Ellipsoid: semi-axes (a,b,c) along x,y,z; geodesics on a subdivided icosahedral mesh.
/// Plane: z = 0.
///
/// Instances are immutable. The ellipsoid mesh is built on construction and shared
/// read-only between copies.
class Manifold {
public:
    static Manifold sphere(double radius);
    static Manifold cylinder(double radius, double height);
    static Manifold cone(double radius, double height);
    static Manifold ellipsoid(double a, double b, double c, int mesh_resolution = 4);
    static Manifold plane();

    ManifoldKind kind() const { return kind_; }
    const std::vector<double>& params() const { return params_; }
    int mesh_resolution() const { return mesh_resolution_; }

    double radius() const;
    double height() const;
    Vec3 semi_axes() const;

    /// R for sphere/cylinder/cone, the largest semi-axis for ellipsoids, 1 for the plane.
    double characteristic_length() const;
    double on_manifold_tolerance() const { return 1e-6 * characteristic_length(); }

    /// Same kind with every length parameter multiplied by s.
    Manifold scaled(double s) const;

    /// Distance of an ambient point from the surface, measured the way each kind's
    /// membership test is defined (radial for sphere/cylinder, normal otherwise).
    double surface_deviation(const Vec3& x) const;
    bool contains(const Vec3& x) const { return surface_deviation(x) <= on_manifold_tolerance(); }

    Vec3 project(const Vec3& x) const;
    SurfacePoint project(int id, const Vec3& x) const { return {id, project(x)}; }

    double geodesic_distance(const Vec3& p, const Vec3& q) const;
    double geodesic_distance(const SurfacePoint& p, const SurfacePoint& q) const {
        return geodesic_distance(p.xyz, q.xyz);
    }

    /// Symmetric matrix of pairwise geodesic distances. The mesh backend runs one
    /// Dijkstra per point instead of one per pair.
    Eigen::MatrixXd pairwise_distances(std::span<const SurfacePoint> points) const;

    bool operator==(const Manifold& other) const {
        return kind_ == other.kind_ && params_ == other.params_ &&
               mesh_resolution_ == other.mesh_resolution_;
    }

private:
    Manifold(ManifoldKind kind, std::vector<double> params, int mesh_resolution);

    ManifoldKind kind_;
    std::vector<double> params_;
    int mesh_resolution_ = 1;
    std::shared_ptr<const GeodesicMesh> mesh_;
};

/// Ambient arithmetic mean of the coordinates (not re-projected).
Vec3 barycenter(std::span<const SurfacePoint> points);
Vec3 barycenter(std::span<const Vec3> points);

}  // namespace smatch
