#include "smatch/mesh_geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

#include "smatch/errors.hpp"

namespace smatch {

namespace {

using Eigen::Vector3d;

constexpr int kShortenCoarse = 8;
constexpr int kShortenFine = 64;
constexpr int kMaxSweeps = 400;

struct IcoSphere {
    std::vector<Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;
};

IcoSphere make_icosphere(int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    IcoSphere s;
    s.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                  {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    for (auto& v : s.vertices) v.normalize();
    s.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
               {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
               {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            s.vertices.push_back((s.vertices[a] + s.vertices[b]).normalized());
            const int idx = static_cast<int>(s.vertices.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(s.faces.size() * 4);
        for (const auto& f : s.faces) {
            const int ab = mid(f[0], f[1]);
            const int bc = mid(f[1], f[2]);
            const int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        s.faces = std::move(next);
    }
    return s;
}

double polyline_length(const std::vector<Vector3d>& path) {
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) total += (path[i] - path[i - 1]).norm();
    return total;
}

/// Resamples a polyline to `segments` equal arc-length pieces (endpoints kept).
std::vector<Vector3d> resample(const std::vector<Vector3d>& path, int segments) {
    std::vector<double> cumulative(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i)
        cumulative[i] = cumulative[i - 1] + (path[i] - path[i - 1]).norm();
    const double total = cumulative.back();

    std::vector<Vector3d> out;
    out.reserve(segments + 1);
    out.push_back(path.front());
    std::size_t seg = 1;
    for (int s = 1; s < segments; ++s) {
        const double target = total * s / segments;
        while (seg + 1 < path.size() && cumulative[seg] < target) ++seg;
        const double span = cumulative[seg] - cumulative[seg - 1];
        const double w = span > 0.0 ? (target - cumulative[seg - 1]) / span : 0.0;
        out.push_back((1.0 - w) * path[seg - 1] + w * path[seg]);
    }
    out.push_back(path.back());
    return out;
}

}  // namespace

Vector3d closest_point_on_ellipsoid(const Vector3d& axes, const Vector3d& y) {
    if (y.norm() == 0.0) throw DegeneratePoint("closest point on ellipsoid undefined at the origin");

    // Stationarity gives x_i = e_i y_i / (t + e_i) with e_i = a_i^2, where t solves
    // F(t) = sum (a_i y_i / (t + e_i))^2 - 1 = 0. F is convex and decreasing to the
    // right of the largest pole, so safeguarded Newton converges.
    const Vector3d e = axes.cwiseProduct(axes);
    double pole = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        if (y[i] != 0.0) pole = std::max(pole, -e[i]);

    auto value = [&](double t, double& slope) {
        double f = -1.0;
        slope = 0.0;
        for (int i = 0; i < 3; ++i) {
            if (y[i] == 0.0) continue;
            const double r = axes[i] * y[i] / (t + e[i]);
            f += r * r;
            slope -= 2.0 * r * r / (t + e[i]);
        }
        return f;
    };

    double t = 0.0;
    double slope = 0.0;
    if (t <= pole) t = pole + 1e-3 * std::abs(pole) + 1e-300;
    for (int iter = 0; iter < 100; ++iter) {
        const double f = value(t, slope);
        if (std::abs(f) < 1e-15) break;
        double next = t - f / slope;
        if (!(next > pole)) next = 0.5 * (t + pole);
        if (std::abs(next - t) <= 1e-16 * std::max(1.0, std::abs(t))) {
            t = next;
            break;
        }
        t = next;
    }
    Vector3d x;
    for (int i = 0; i < 3; ++i) x[i] = y[i] == 0.0 ? 0.0 : e[i] * y[i] / (t + e[i]);
    // Snap onto the surface to absorb the residual of the root solve.
    const double level = std::sqrt((x.array() / axes.array()).square().sum());
    return x / level;
}

GeodesicMesh::GeodesicMesh(const Vector3d& axes, int subdivisions) : axes_(axes) {
    const IcoSphere ico = make_icosphere(subdivisions);
    vertices_.reserve(ico.vertices.size());
    for (const auto& v : ico.vertices) vertices_.push_back(v.cwiseProduct(axes));

    adjacency_.assign(vertices_.size(), {});
    auto link = [&](int a, int b) {
        auto& list = adjacency_[a];
        if (std::any_of(list.begin(), list.end(), [b](const Arc& arc) { return arc.to == b; }))
            return;
        const double len = (vertices_[a] - vertices_[b]).norm();
        list.push_back({b, len});
        adjacency_[b].push_back({a, len});
    };
    for (const auto& f : ico.faces) {
        link(f[0], f[1]);
        link(f[1], f[2]);
        link(f[2], f[0]);
    }
}

GeodesicMesh::Attachment GeodesicMesh::attach(const Vector3d& p) const {
    int nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const double d = (vertices_[i] - p).squaredNorm();
        if (d < best) {
            best = d;
            nearest = static_cast<int>(i);
        }
    }
    Attachment a;
    a.vertices.push_back(nearest);
    for (const Arc& arc : adjacency_[nearest]) a.vertices.push_back(arc.to);
    std::sort(a.vertices.begin(), a.vertices.end());
    for (int v : a.vertices) a.lengths.push_back((vertices_[v] - p).norm());
    return a;
}

GeodesicMesh::Tree GeodesicMesh::dijkstra(const Attachment& source) const {
    const std::size_t n = vertices_.size();
    Tree tree{std::vector<double>(n, std::numeric_limits<double>::infinity()),
              std::vector<int>(n, -1), std::vector<int>(n, -1)};
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    for (std::size_t i = 0; i < source.vertices.size(); ++i) {
        const int v = source.vertices[i];
        if (source.lengths[i] < tree.dist[v]) {
            tree.dist[v] = source.lengths[i];
            tree.root[v] = static_cast<int>(i);
            queue.emplace(source.lengths[i], v);
        }
    }
    while (!queue.empty()) {
        const auto [d, v] = queue.top();
        queue.pop();
        if (d > tree.dist[v]) continue;
        for (const Arc& arc : adjacency_[v]) {
            const double nd = d + arc.length;
            if (nd < tree.dist[arc.to]) {
                tree.dist[arc.to] = nd;
                tree.parent[arc.to] = v;
                tree.root[arc.to] = tree.root[v];
                queue.emplace(nd, arc.to);
            }
        }
    }
    return tree;
}

std::pair<int, double> GeodesicMesh::best_exit(const Tree& tree, const Attachment& target) const {
    int exit = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < target.vertices.size(); ++i) {
        const int v = target.vertices[i];
        const double total = tree.dist[v] + target.lengths[i];
        if (total < best) {
            best = total;
            exit = v;
        }
    }
    return {exit, best};
}

std::vector<Vector3d> GeodesicMesh::trace(const Tree& tree, int exit, const Vector3d& p,
                                          const Vector3d& q) const {
    std::vector<Vector3d> path{q};
    for (int v = exit; v >= 0; v = tree.parent[v]) path.push_back(vertices_[v]);
    path.push_back(p);
    std::reverse(path.begin(), path.end());
    return path;
}

double GeodesicMesh::shorten(std::vector<Vector3d> path) const {
    const double scale = axes_.maxCoeff();
    if ((path.front() - path.back()).norm() <= 1e-12 * scale) return 0.0;

    int segments = kShortenCoarse;
    std::vector<Vector3d> pts = resample(path, segments);
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) pts[i] = closest_point_on_ellipsoid(axes_, pts[i]);

    while (true) {
        const double tol = 1e-12 * std::max(polyline_length(pts), scale);
        for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
            double moved = 0.0;
            for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
                const Vector3d next = closest_point_on_ellipsoid(axes_, 0.5 * (pts[i - 1] + pts[i + 1]));
                moved = std::max(moved, (next - pts[i]).norm());
                pts[i] = next;
            }
            if (moved < tol) break;
        }
        if (segments >= kShortenFine) break;
        std::vector<Vector3d> finer;
        finer.reserve(2 * pts.size());
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            finer.push_back(pts[i]);
            finer.push_back(closest_point_on_ellipsoid(axes_, 0.5 * (pts[i] + pts[i + 1])));
        }
        finer.push_back(pts.back());
        pts = std::move(finer);
        segments *= 2;
    }
    return polyline_length(pts);
}

namespace {
bool lex_less(const Vector3d& a, const Vector3d& b) {
    return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
}
}  // namespace

double GeodesicMesh::graph_distance(const Vector3d& p, const Vector3d& q) const {
    const Vector3d& a = lex_less(q, p) ? q : p;
    const Vector3d& b = lex_less(q, p) ? p : q;
    const Tree tree = dijkstra(attach(a));
    return best_exit(tree, attach(b)).second;
}

double GeodesicMesh::distance_ordered(const Vector3d& p, const Vector3d& q) const {
    const Tree tree = dijkstra(attach(p));
    const auto [exit, len] = best_exit(tree, attach(q));
    (void)len;
    return shorten(trace(tree, exit, p, q));
}

double GeodesicMesh::distance(const Vector3d& p, const Vector3d& q) const {
    if (p == q) return 0.0;
    return lex_less(q, p) ? distance_ordered(q, p) : distance_ordered(p, q);
}

Eigen::MatrixXd GeodesicMesh::pairwise(std::span<const Vector3d> points) const {
    const std::size_t n = points.size();
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<Attachment> attachments;
    attachments.reserve(n);
    for (const auto& p : points) attachments.push_back(attach(p));

    for (std::size_t i = 0; i < n; ++i) {
        const Tree tree = dijkstra(attachments[i]);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || points[i] == points[j]) continue;
            // Each unordered pair is evaluated from its lexicographically smaller end,
            // matching distance().
            if (lex_less(points[j], points[i])) continue;
            const auto [exit, len] = best_exit(tree, attachments[j]);
            (void)len;
            const double value = shorten(trace(tree, exit, points[i], points[j]));
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value;
            d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = value;
        }
    }
    return d;
}

}  // namespace smatch
