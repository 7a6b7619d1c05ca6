#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "smatch/geometry.hpp"
#include "smatch/mesh_geodesic.hpp"

using namespace smatch;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec3 v(g(rng), g(rng), g(rng));
    return v.normalized();
}

}  // namespace

TEST_CASE("manifold parameters must be positive") {
    CHECK_THROWS_AS(Manifold::sphere(0.0), InvalidArgument);
    CHECK_THROWS_AS(Manifold::cylinder(1.0, -1.0), InvalidArgument);
    CHECK_THROWS_AS(Manifold::cone(-1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(Manifold::ellipsoid(1.0, 1.0, 1.0, 0), InvalidArgument);
}

TEST_CASE("projection onto the sphere") {
    const auto s = Manifold::sphere(1.0);
    CHECK((s.project(Vec3(2, 0, 0)) - Vec3(1, 0, 0)).norm() == doctest::Approx(0.0));
    CHECK((s.project(Vec3(1, 0, 0)) - Vec3(1, 0, 0)).norm() == doctest::Approx(0.0));
    CHECK_THROWS_AS(s.project(Vec3::Zero()), DegeneratePoint);
}

TEST_CASE("projection onto the plane is the identity on the plane") {
    const auto pl = Manifold::plane();
    CHECK((pl.project(Vec3(3, 4, 0)) - Vec3(3, 4, 0)).norm() == 0.0);
}

TEST_CASE("projection is idempotent and lands on the surface") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const Manifold kinds[] = {Manifold::sphere(1.5), Manifold::cylinder(1.0, 2.0), Manifold::cone(1.0, 2.0),
                              Manifold::ellipsoid(1.0, 2.0, 3.0, 2), Manifold::plane()};
    for (const auto& m : kinds)
        for (int t = 0; t < 50; ++t) {
            const Vec3 x(u(rng), u(rng), u(rng));
            Vec3 p;
            try {
                p = m.project(x);
            } catch (const DegeneratePoint&) {
                continue;
            }
            CHECK(m.contains(p));
            CHECK((m.project(p) - p).norm() <= 1e-9 * m.characteristic_length());
        }
}

TEST_CASE("cone apex axis is degenerate") {
    const auto c = Manifold::cone(1.0, 2.0);
    CHECK_THROWS_AS(c.project(Vec3(0, 0, 1)), DegeneratePoint);
}

TEST_CASE("closed-form geodesic values") {
    CHECK(Manifold::sphere(1.0).geodesic_distance(Vec3(1, 0, 0), Vec3(0, 1, 0)) ==
          doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
    CHECK(Manifold::cylinder(1.0, 5.0).geodesic_distance(Vec3(1, 0, 1), Vec3(0, 1, 4)) ==
          doctest::Approx(std::hypot(std::numbers::pi / 2, 3.0)).epsilon(1e-12));
    CHECK(Manifold::plane().geodesic_distance(Vec3(0, 0, 0), Vec3(3, 4, 0)) == doctest::Approx(5.0));
}

TEST_CASE("cone geodesic along one generator is the slant difference") {
    const auto c = Manifold::cone(1.0, 1.0);
    const Vec3 rim(1, 0, 0);
    const Vec3 mid(0.5, 0, 0.5);
    CHECK(c.geodesic_distance(rim, mid) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("cone geodesic equals the chord in the unrolled sector") {
    // Independent unrolling: sector radius = slant distance from apex, angle scaled by R/slant.
    const double R = 1.0, H = 2.0, slant = std::hypot(R, H);
    const auto c = Manifold::cone(R, H);
    const Vec3 p = c.project(Vec3(0.8, 0.1, 0.3));
    const Vec3 q = c.project(Vec3(-0.2, 0.7, 0.9));
    const Vec3 apex(0, 0, H);
    const double ap = std::atan2(p.y(), p.x()) * R / slant;
    const double aq = std::atan2(q.y(), q.x()) * R / slant;
    const Eigen::Vector2d up = (p - apex).norm() * Eigen::Vector2d(std::cos(ap), std::sin(ap));
    const Eigen::Vector2d uq = (q - apex).norm() * Eigen::Vector2d(std::cos(aq), std::sin(aq));
    CHECK(c.geodesic_distance(p, q) == doctest::Approx((up - uq).norm()).epsilon(1e-12));
}

TEST_CASE("round ellipsoid mesh geodesic matches the sphere value") {
    const auto e = Manifold::ellipsoid(2.0, 2.0, 2.0, 4);
    CHECK(std::abs(e.geodesic_distance(Vec3(2, 0, 0), Vec3(0, 2, 0)) - std::numbers::pi) <= 1e-2);
}

TEST_CASE("sphere formula agrees with a dense-mesh Dijkstra oracle") {
    GeodesicMesh mesh(Vec3(1, 1, 1), 4);
    const auto s = Manifold::sphere(1.0);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 30; ++t) {
        const Vec3 p = random_unit(rng), q = random_unit(rng);
        const double exact = std::acos(std::clamp(p.dot(q), -1.0, 1.0));
        if (exact < 0.3) continue;
        CHECK(std::abs(s.geodesic_distance(p, q) - exact) <= 1e-12);
        CHECK(std::abs(mesh.distance(p, q) - exact) <= 0.02 * exact);
    }
}

TEST_CASE("geodesic distance is symmetric and zero on the diagonal") {
    std::mt19937_64 rng(3);
    const Manifold kinds[] = {Manifold::sphere(1.0), Manifold::cylinder(1.0, 2.0), Manifold::cone(1.0, 2.0),
                              Manifold::ellipsoid(1.0, 1.5, 2.0, 3), Manifold::plane()};
    for (const auto& m : kinds)
        for (int t = 0; t < 10; ++t) {
            const Vec3 p = m.project(random_unit(rng) * 1.3 + Vec3(0, 0, 0.9));
            const Vec3 q = m.project(random_unit(rng) * 1.3 + Vec3(0, 0, 0.9));
            const double dpq = m.geodesic_distance(p, q);
            const double dqp = m.geodesic_distance(q, p);
            if (m.kind() == ManifoldKind::Ellipsoid)
                CHECK(std::abs(dpq - dqp) <= 1e-9);
            else
                CHECK(dpq == dqp);
            CHECK(m.geodesic_distance(p, p) == doctest::Approx(0.0));
        }
}

TEST_CASE("ellipsoid mesh geodesics satisfy the triangle inequality within tolerance") {
    const auto e = Manifold::ellipsoid(1.0, 1.5, 2.0, 3);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
        const Vec3 a = e.project(random_unit(rng)), b = e.project(random_unit(rng)), c = e.project(random_unit(rng));
        CHECK(e.geodesic_distance(a, c) <= e.geodesic_distance(a, b) + e.geodesic_distance(b, c) + 2e-2);
    }
}

TEST_CASE("geodesics are invariant under isometries of the sphere and round ellipsoid") {
    std::mt19937_64 rng(9);
    const Eigen::Matrix3d Q = Eigen::AngleAxisd(0.7, random_unit(rng)).toRotationMatrix();
    const auto s = Manifold::sphere(2.0);
    const auto e = Manifold::ellipsoid(1.0, 1.0, 1.0, 3);
    for (int t = 0; t < 10; ++t) {
        const Vec3 p = random_unit(rng), q = random_unit(rng);
        CHECK(std::abs(s.geodesic_distance(2 * p, 2 * q) - s.geodesic_distance(2 * Q * p, 2 * Q * q)) <= 1e-9);
        Vec3 rp = p, rq = q;
        rp.x() = -rp.x();
        rq.x() = -rq.x();
        CHECK(std::abs(s.geodesic_distance(2 * p, 2 * q) - s.geodesic_distance(2 * rp, 2 * rq)) <= 1e-9);
        // Mesh backend: the mesh itself is not rotation-invariant, so only mesh tolerance applies.
        CHECK(std::abs(e.geodesic_distance(p, q) - e.geodesic_distance(Q * p, Q * q)) <= 2e-2);
    }
}

TEST_CASE("uniform scaling scales closed-form geodesics exactly") {
    std::mt19937_64 rng(13);
    const double s = 3.0;
    const Manifold kinds[] = {Manifold::sphere(1.0), Manifold::cylinder(1.0, 2.0), Manifold::cone(1.0, 2.0),
                              Manifold::plane()};
    for (const auto& m : kinds) {
        const auto ms = m.scaled(s);
        for (int t = 0; t < 10; ++t) {
            const Vec3 p = m.project(random_unit(rng) + Vec3(0, 0, 0.8));
            const Vec3 q = m.project(random_unit(rng) + Vec3(0, 0, 0.8));
            CHECK(ms.geodesic_distance(s * p, s * q) == doctest::Approx(s * m.geodesic_distance(p, q)).epsilon(1e-12));
        }
    }
}

TEST_CASE("on-manifold tolerance is relative to the characteristic length") {
    const auto s = Manifold::sphere(1.0);
    CHECK(s.contains(Vec3(1.0 + 5e-7, 0, 0)));
    CHECK_FALSE(s.contains(Vec3(1.0 + 5e-6, 0, 0)));
    const auto big = Manifold::sphere(100.0);
    CHECK(big.contains(Vec3(100.0 + 5e-5, 0, 0)));
}

TEST_CASE("barycenters are ambient means") {
    std::vector<Vec3> one{Vec3(1, 0, 0)};
    CHECK((barycenter(std::span<const Vec3>(one)) - Vec3(1, 0, 0)).norm() == 0.0);
    std::vector<Vec3> two{Vec3(1, 0, 0), Vec3(-1, 0, 0)};
    CHECK(barycenter(std::span<const Vec3>(two)).norm() == 0.0);
    std::vector<SurfacePoint> three{{0, Vec3(1, 0, 0)}, {1, Vec3(0, 1, 0)}, {2, Vec3(0, 0, 1)}};
    CHECK((barycenter(std::span<const SurfacePoint>(three)) - Vec3::Constant(1.0 / 3)).norm() ==
          doctest::Approx(0.0));
    CHECK_THROWS_AS(barycenter(std::span<const Vec3>()), EmptySimplex);
}

TEST_CASE("manifold kind names round-trip") {
    for (auto k : {ManifoldKind::Sphere, ManifoldKind::Cylinder, ManifoldKind::Cone, ManifoldKind::Ellipsoid,
                   ManifoldKind::Plane})
        CHECK(manifold_kind_from_string(to_string(k)) == k);
    CHECK_THROWS(manifold_kind_from_string("torus"));
}
