#include "smatch/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include <Eigen/Geometry>

namespace smatch {

void PerturbationSpec::validate() const {
    auto prob = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(std::string(name) + " must lie in [0, 1]");
    };
    switch (kind) {
        case Kind::Rotate:
            if (!(axis.norm() > 0.0) || !std::isfinite(angle_deg)) throw InvalidArgument("rotation needs a nonzero axis");
            break;
        case Kind::Reflect:
            if (reflect_axis < 0 || reflect_axis > 2) throw InvalidArgument("reflection axis must be 0, 1 or 2");
            break;
        case Kind::Scale:
            if (!(scale.minCoeff() > 0.0)) throw InvalidArgument("scale factors must be positive");
            break;
        case Kind::Shear:
            if (shear_axes.first == shear_axes.second || shear_axes.first < 0 || shear_axes.first > 2 ||
                shear_axes.second < 0 || shear_axes.second > 2)
                throw InvalidArgument("shear needs two distinct axes");
            break;
        case Kind::NoiseI: prob(p, "p"); break;
        case Kind::NoiseII:
            prob(p, "p");
            prob(q, "q");
            break;
        case Kind::Mcar:
            if (!(fraction >= 0.0 && fraction < 1.0)) throw InvalidArgument("fraction must lie in [0, 1)");
            break;
    }
}

PerturbationSpec::Kind perturbation_kind_from_string(std::string_view name) {
    using K = PerturbationSpec::Kind;
    if (name == "rotate") return K::Rotate;
    if (name == "reflect") return K::Reflect;
    if (name == "scale") return K::Scale;
    if (name == "shear") return K::Shear;
    if (name == "noise1" || name == "noiseI") return K::NoiseI;
    if (name == "noise2" || name == "noiseII") return K::NoiseII;
    if (name == "mcar") return K::Mcar;
    throw InvalidArgument("unknown perturbation kind: " + std::string(name));
}

namespace {

std::set<Edge> edge_set(const std::vector<Edge>& edges) {
    std::set<Edge> s;
    for (const auto& e : edges)
        if (e.first != e.second) s.insert(std::minmax(e.first, e.second));
    return s;
}

/// One uniform draw per unordered pair (i < j), row by row.
template <class F>
std::vector<Edge> redraw(std::size_t n, const std::vector<Edge>& edges, std::uint64_t seed, F&& keep) {
    const auto present = edge_set(edges);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<Edge> out;
    const int m = static_cast<int>(n);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (keep(present.contains({i, j}), u01(rng))) out.emplace_back(i, j);
    return out;
}

/// Index-based edges of the set's graph (stored edges or the k-NN rule).
std::vector<Edge> index_edges(const LandmarkSet& set, int k) { return landmark_graph(set, k).edges; }

LandmarkSet with_index_edges(const LandmarkSet& set, const std::vector<Edge>& edges) {
    LandmarkSet out = set;
    out.edges.emplace();
    for (const auto& [a, b] : edges) out.edges->emplace_back(set.points[a].id, set.points[b].id);
    return out;
}

LandmarkSet map_points(const LandmarkSet& set, const Eigen::Matrix3d& A) {
    LandmarkSet out = set;
    for (auto& p : out.points) p.xyz = A * p.xyz;
    std::vector<int> off;
    for (const auto& p : out.points)
        if (!out.manifold.contains(p.xyz)) off.push_back(p.id);
    if (!off.empty()) throw OffManifold(off);
    return out;
}

}  // namespace

std::vector<Edge> noise_model_one(std::size_t n, const std::vector<Edge>& edges, double p, std::uint64_t seed) {
    return redraw(n, edges, seed, [p](bool present, double u) { return u < p ? !present : present; });
}

std::vector<Edge> noise_model_two(std::size_t n, const std::vector<Edge>& edges, double p, double q,
                                  std::uint64_t seed) {
    return redraw(n, edges, seed, [p, q](bool present, double u) { return present ? !(u < p) : u < q; });
}

LandmarkSet linear_reproject(const LandmarkSet& set, const Eigen::Matrix3d& A) {
    LandmarkSet out = set;
    std::vector<Vec3> y;
    for (const auto& p : set.points) y.push_back(A * p.xyz);
    const double count = std::max<double>(1.0, static_cast<double>(y.size()));

    const Manifold& m = set.manifold;
    switch (m.kind()) {
        case ManifoldKind::Sphere: {
            double r = 0.0;
            for (const auto& v : y) r += v.norm();
            out.manifold = Manifold::sphere(y.empty() ? m.radius() : r / count);
            break;
        }
        case ManifoldKind::Cylinder: {
            double r = 0.0, h = 0.0;
            for (const auto& v : y) {
                r += std::hypot(v.x(), v.y());
                h = std::max(h, v.z());
            }
            out.manifold = Manifold::cylinder(y.empty() ? m.radius() : r / count, h > 0.0 ? h : m.height());
            break;
        }
        case ManifoldKind::Cone: {
            const double h = A(2, 2) > 0.0 ? m.height() * A(2, 2) : m.height();
            double r = 0.0;
            int used = 0;
            for (const auto& v : y)
                if (v.z() < 0.95 * h) {
                    r += std::hypot(v.x(), v.y()) / (1.0 - v.z() / h);
                    ++used;
                }
            out.manifold = Manifold::cone(used > 0 ? r / used : m.radius(), h);
            break;
        }
        case ManifoldKind::Ellipsoid: {
            // Extent of the image ellipsoid along each coordinate axis.
            const Eigen::Matrix3d E = A * m.semi_axes().asDiagonal();
            const Vec3 ext = E.rowwise().norm();
            out.manifold = Manifold::ellipsoid(ext.x(), ext.y(), ext.z(), m.mesh_resolution());
            break;
        }
        case ManifoldKind::Plane: break;
    }
    for (std::size_t i = 0; i < y.size(); ++i) out.points[i].xyz = out.manifold.project(y[i]);
    return out;
}

LandmarkSet scale_instance(const LandmarkSet& set, double s) {
    LandmarkSet out = set;
    out.manifold = set.manifold.scaled(s);
    for (auto& p : out.points) p.xyz *= s;
    if (set.manifold.kind() == ManifoldKind::Plane)
        for (auto& p : out.points) p.xyz.z() = 0.0;
    return out;
}

Perturbed apply_perturbation(const LandmarkSet& set, const PerturbationSpec& spec) {
    spec.validate();
    using K = PerturbationSpec::Kind;
    Perturbed out;
    switch (spec.kind) {
        case K::Rotate: {
            const double rad = spec.angle_deg * std::numbers::pi / 180.0;
            out.set = map_points(set, Eigen::AngleAxisd(rad, spec.axis.normalized()).toRotationMatrix());
            break;
        }
        case K::Reflect: {
            Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
            R(spec.reflect_axis, spec.reflect_axis) = -1.0;
            out.set = map_points(set, R);
            break;
        }
        case K::Scale: out.set = linear_reproject(set, spec.scale.asDiagonal().toDenseMatrix()); break;
        case K::Shear: {
            Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
            S(spec.shear_axes.first, spec.shear_axes.second) = spec.shear;
            out.set = linear_reproject(set, S);
            break;
        }
        case K::NoiseI:
            out.set = with_index_edges(set, noise_model_one(set.points.size(), index_edges(set, spec.k), spec.p, spec.seed));
            break;
        case K::NoiseII:
            out.set = with_index_edges(
                set, noise_model_two(set.points.size(), index_edges(set, spec.k), spec.p, spec.q, spec.seed));
            break;
        case K::Mcar: {
            const std::size_t n = set.points.size();
            std::vector<bool> removed(n, false);
            std::mt19937_64 rng(spec.seed);
            if (spec.exact_count) {
                std::vector<std::size_t> order(n);
                std::iota(order.begin(), order.end(), 0);
                std::shuffle(order.begin(), order.end(), rng);
                const auto drop = static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(n)));
                for (std::size_t i = 0; i < drop && i < n; ++i) removed[order[i]] = true;
            } else {
                std::uniform_real_distribution<double> u01(0.0, 1.0);
                for (std::size_t i = 0; i < n; ++i) removed[i] = u01(rng) < spec.fraction;
            }
            out.set.manifold = set.manifold;
            std::set<int> alive;
            for (std::size_t i = 0; i < n; ++i)
                if (!removed[i]) {
                    out.set.points.push_back(set.points[i]);
                    alive.insert(set.points[i].id);
                }
            if (set.edges) {
                out.set.edges.emplace();
                for (const auto& [a, b] : *set.edges)
                    if (alive.contains(a) && alive.contains(b)) out.set.edges->emplace_back(a, b);
            }
            break;
        }
    }
    out.ground_truth = identity_ground_truth(out.set);
    return out;
}

}  // namespace smatch
