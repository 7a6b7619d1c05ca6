#include "smatch/geometry.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <string>

#include "smatch/mesh_geodesic.hpp"

namespace smatch {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidArgument(std::string(what) + " must be a positive finite number");
}

/// Unsigned angle between the xy projections of two vectors, in [0, pi].
double planar_angle(const Vec3& a, const Vec3& b) {
    const double cross = a.x() * b.y() - a.y() * b.x();
    const double dot = a.x() * b.x() + a.y() * b.y();
    return std::atan2(std::abs(cross), dot);
}

}  // namespace

std::string_view to_string(ManifoldKind kind) {
    switch (kind) {
        case ManifoldKind::Sphere: return "sphere";
        case ManifoldKind::Cylinder: return "cylinder";
        case ManifoldKind::Cone: return "cone";
        case ManifoldKind::Ellipsoid: return "ellipsoid";
        case ManifoldKind::Plane: return "plane";
    }
    return "unknown";
}

ManifoldKind manifold_kind_from_string(std::string_view name) {
    if (name == "sphere") return ManifoldKind::Sphere;
    if (name == "cylinder") return ManifoldKind::Cylinder;
    if (name == "cone") return ManifoldKind::Cone;
    if (name == "ellipsoid") return ManifoldKind::Ellipsoid;
    if (name == "plane") return ManifoldKind::Plane;
    throw InvalidArgument("unknown manifold kind '" + std::string(name) + "'");
}

Manifold::Manifold(ManifoldKind kind, std::vector<double> params, int mesh_resolution)
    : kind_(kind), params_(std::move(params)), mesh_resolution_(mesh_resolution) {
    for (double p : params_) require_positive(p, "manifold parameter");
    if (mesh_resolution_ < 1) throw InvalidArgument("mesh_resolution must be >= 1");
    if (kind_ == ManifoldKind::Ellipsoid)
        mesh_ = std::make_shared<const GeodesicMesh>(semi_axes(), mesh_resolution_);
}

Manifold Manifold::sphere(double radius) { return Manifold(ManifoldKind::Sphere, {radius}, 1); }
Manifold Manifold::cylinder(double radius, double height) {
    return Manifold(ManifoldKind::Cylinder, {radius, height}, 1);
}
Manifold Manifold::cone(double radius, double height) {
    return Manifold(ManifoldKind::Cone, {radius, height}, 1);
}
Manifold Manifold::ellipsoid(double a, double b, double c, int mesh_resolution) {
    return Manifold(ManifoldKind::Ellipsoid, {a, b, c}, mesh_resolution);
}
Manifold Manifold::plane() { return Manifold(ManifoldKind::Plane, {}, 1); }

double Manifold::radius() const {
    if (kind_ == ManifoldKind::Ellipsoid || kind_ == ManifoldKind::Plane)
        throw InvalidArgument("manifold has no single radius");
    return params_[0];
}

double Manifold::height() const {
    if (kind_ != ManifoldKind::Cylinder && kind_ != ManifoldKind::Cone)
        throw InvalidArgument("manifold has no height");
    return params_[1];
}

Vec3 Manifold::semi_axes() const {
    if (kind_ != ManifoldKind::Ellipsoid) throw InvalidArgument("manifold has no semi-axes");
    return {params_[0], params_[1], params_[2]};
}

double Manifold::characteristic_length() const {
    switch (kind_) {
        case ManifoldKind::Ellipsoid: return *std::max_element(params_.begin(), params_.end());
        case ManifoldKind::Plane: return 1.0;
        default: return params_[0];
    }
}

Manifold Manifold::scaled(double s) const {
    require_positive(s, "scale");
    std::vector<double> p = params_;
    for (double& v : p) v *= s;
    return Manifold(kind_, std::move(p), mesh_resolution_);
}

double Manifold::surface_deviation(const Vec3& x) const {
    switch (kind_) {
        case ManifoldKind::Sphere: return std::abs(x.norm() - params_[0]);
        case ManifoldKind::Cylinder: {
            const double r = std::hypot(x.x(), x.y());
            const double dz = std::max({0.0, -x.z(), x.z() - params_[1]});
            return std::hypot(r - params_[0], dz);
        }
        case ManifoldKind::Cone:
        case ManifoldKind::Ellipsoid:
            try {
                return (project(x) - x).norm();
            } catch (const DegeneratePoint&) {
                return std::numeric_limits<double>::infinity();
            }
        case ManifoldKind::Plane: return std::abs(x.z());
    }
    return std::numeric_limits<double>::infinity();
}

Vec3 Manifold::project(const Vec3& x) const {
    switch (kind_) {
        case ManifoldKind::Sphere: {
            const double n = x.norm();
            if (n == 0.0) throw DegeneratePoint("cannot project the origin onto a sphere");
            return x * (params_[0] / n);
        }
        case ManifoldKind::Cylinder: {
            const double r = std::hypot(x.x(), x.y());
            if (r == 0.0) throw DegeneratePoint("cannot project a point on the cylinder axis");
            const double s = params_[0] / r;
            return {x.x() * s, x.y() * s, std::clamp(x.z(), 0.0, params_[1])};
        }
        case ManifoldKind::Cone: {
            const double R = params_[0];
            const double H = params_[1];
            const double r = std::hypot(x.x(), x.y());
            if (r == 0.0) throw DegeneratePoint("cannot project a point on the cone axis");
            // Closest point on the generator segment from the apex (0,H) to the rim (R,0)
            // in the meridian half-plane through x.
            const double slant2 = R * R + H * H;
            double t = (r * R + (x.z() - H) * (-H)) / slant2;
            t = std::clamp(t, 0.0, 1.0);
            if (t == 0.0) throw DegeneratePoint("point projects onto the cone apex");
            const double pr = t * R;
            return {x.x() / r * pr, x.y() / r * pr, H - t * H};
        }
        case ManifoldKind::Ellipsoid: return closest_point_on_ellipsoid(semi_axes(), x);
        case ManifoldKind::Plane: return {x.x(), x.y(), 0.0};
    }
    return x;
}

double Manifold::geodesic_distance(const Vec3& p, const Vec3& q) const {
    switch (kind_) {
        case ManifoldKind::Sphere: {
            const double angle = std::atan2(p.cross(q).norm(), p.dot(q));
            return params_[0] * angle;
        }
        case ManifoldKind::Cylinder: {
            const double arc = params_[0] * planar_angle(p, q);
            return std::hypot(arc, p.z() - q.z());
        }
        case ManifoldKind::Cone: {
            // Unroll the lateral surface into a planar sector of angle 2*pi*R/slant.
            const double R = params_[0];
            const double H = params_[1];
            const double slant = std::hypot(R, H);
            const Vec3 apex(0.0, 0.0, H);
            const double rp = (p - apex).norm();
            const double rq = (q - apex).norm();
            const double phi = planar_angle(p, q) * R / slant;
            const double s = std::sin(0.5 * phi);
            return std::sqrt((rp - rq) * (rp - rq) + 4.0 * rp * rq * s * s);
        }
        case ManifoldKind::Ellipsoid: return mesh_->distance(p, q);
        case ManifoldKind::Plane: return std::hypot(p.x() - q.x(), p.y() - q.y());
    }
    return 0.0;
}

Eigen::MatrixXd Manifold::pairwise_distances(std::span<const SurfacePoint> points) const {
    const auto n = static_cast<Eigen::Index>(points.size());
    if (kind_ == ManifoldKind::Ellipsoid) {
        std::vector<Vec3> xyz;
        xyz.reserve(points.size());
        for (const auto& p : points) xyz.push_back(p.xyz);
        return mesh_->pairwise(xyz);
    }
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = geodesic_distance(points[i].xyz, points[j].xyz);
            d(i, j) = v;
            d(j, i) = v;
        }
    return d;
}

Vec3 barycenter(std::span<const Vec3> points) {
    if (points.empty()) throw EmptySimplex();
    Vec3 sum = Vec3::Zero();
    for (const auto& p : points) sum += p;
    return sum / static_cast<double>(points.size());
}

Vec3 barycenter(std::span<const SurfacePoint> points) {
    if (points.empty()) throw EmptySimplex();
    Vec3 sum = Vec3::Zero();
    for (const auto& p : points) sum += p.xyz;
    return sum / static_cast<double>(points.size());
}

OffManifold::OffManifold(std::vector<int> ids)
    : Error([&] {
          std::string msg = "points off the manifold:";
          for (int id : ids) msg += " " + std::to_string(id);
          return msg;
      }()),
      ids_(std::move(ids)) {}

}  // namespace smatch
