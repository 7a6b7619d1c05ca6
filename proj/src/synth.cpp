#include "smatch/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace smatch {

namespace {

Vec3 unit_sphere(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    for (;;) {
        Vec3 v(gauss(rng), gauss(rng), gauss(rng));
        const double n = v.norm();
        if (n > 1e-12) return v / n;
    }
}

/// One area-uniform draw. The ellipsoid uses rejection on the sphere map, weighting
/// by the ratio of surface elements.
Vec3 draw(const Manifold& m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    switch (m.kind()) {
        case ManifoldKind::Sphere: return m.radius() * unit_sphere(rng);
        case ManifoldKind::Cylinder: {
            const double t = two_pi * u01(rng);
            return {m.radius() * std::cos(t), m.radius() * std::sin(t), m.height() * u01(rng)};
        }
        case ManifoldKind::Cone: {
            // Lateral area grows linearly with the distance s from the apex.
            const double s = std::sqrt(u01(rng));
            const double t = two_pi * u01(rng);
            return {s * m.radius() * std::cos(t), s * m.radius() * std::sin(t), m.height() * (1.0 - s)};
        }
        case ManifoldKind::Ellipsoid: {
            const Vec3 ax = m.semi_axes();
            const double bc = ax.y() * ax.z(), ac = ax.x() * ax.z(), ab = ax.x() * ax.y();
            const double top = std::max({bc, ac, ab});
            for (;;) {
                const Vec3 u = unit_sphere(rng);
                const double g = std::sqrt(std::pow(bc * u.x(), 2) + std::pow(ac * u.y(), 2) + std::pow(ab * u.z(), 2));
                if (u01(rng) * top <= g) return m.project(u.cwiseProduct(ax));
            }
        }
        case ManifoldKind::Plane: return {2.0 * u01(rng) - 1.0, 2.0 * u01(rng) - 1.0, 0.0};
    }
    return Vec3::Zero();
}

}  // namespace

LandmarkSet synth_landmarks(const Manifold& manifold, int n, double min_separation, std::uint64_t seed,
                            int attempts_per_point) {
    if (n < 1) throw InvalidArgument("n must be >= 1");
    if (min_separation < 0.0) throw InvalidArgument("min_separation must be >= 0");
    std::mt19937_64 rng(seed);
    LandmarkSet set;
    set.manifold = manifold;
    set.points.reserve(static_cast<std::size_t>(n));

    long budget = static_cast<long>(attempts_per_point) * n;
    while (static_cast<int>(set.points.size()) < n) {
        if (budget-- <= 0)
            throw InfeasiblePacking("placed " + std::to_string(set.points.size()) + " of " + std::to_string(n) +
                                    " points at separation " + std::to_string(min_separation));
        const Vec3 x = draw(manifold, rng);
        bool ok = true;
        for (const auto& p : set.points) {
            // Chords never exceed geodesics, so only close chords need the metric.
            if ((p.xyz - x).norm() >= min_separation) continue;
            if (manifold.geodesic_distance(p.xyz, x) < min_separation) {
                ok = false;
                break;
            }
        }
        if (ok) set.points.push_back({static_cast<int>(set.points.size()), x});
    }
    return set;
}

}  // namespace smatch
