#include "smatch/render.hpp"

#include <map>
#include <set>
#include <sstream>

namespace smatch {

namespace {

constexpr double kPanel = 400.0;
constexpr double kMargin = 20.0;

struct View {
    bool plane = false;
    double lo_u = 0, hi_u = 1, lo_v = 0, hi_v = 1;

    std::pair<double, double> uv(const Vec3& x) const { return {x.x(), plane ? x.y() : x.z()}; }

    /// Screen position inside the panel starting at x offset `left`; v grows upward.
    std::pair<double, double> screen(const Vec3& x, double left) const {
        auto [u, v] = uv(x);
        const double span = std::max({hi_u - lo_u, hi_v - lo_v, 1e-12});
        const double s = (kPanel - 2 * kMargin) / span;
        return {left + kMargin + (u - lo_u) * s, kPanel - kMargin - (v - lo_v) * s};
    }
};

View fit(const LandmarkSet& set) {
    View v;
    v.plane = set.manifold.kind() == ManifoldKind::Plane;
    if (set.points.empty()) return v;
    v.lo_u = v.lo_v = std::numeric_limits<double>::infinity();
    v.hi_u = v.hi_v = -std::numeric_limits<double>::infinity();
    for (const auto& p : set.points) {
        auto [a, b] = v.uv(p.xyz);
        v.lo_u = std::min(v.lo_u, a);
        v.hi_u = std::max(v.hi_u, a);
        v.lo_v = std::min(v.lo_v, b);
        v.hi_v = std::max(v.hi_v, b);
    }
    return v;
}

}  // namespace

std::string render_svg(const std::vector<std::pair<int, int>>& vertex_map, const LandmarkSet& src,
                       const LandmarkSet& tgt, const std::optional<GroundTruth>& gt) {
    const View vs = fit(src), vt = fit(tgt);
    std::map<int, Vec3> a, b;
    for (const auto& p : src.points) a[p.id] = p.xyz;
    for (const auto& p : tgt.points) b[p.id] = p.xyz;
    std::set<std::pair<int, int>> truth;
    if (gt) truth.insert(gt->pairs.begin(), gt->pairs.end());
    std::set<int> used_a, used_b;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * kPanel << "\" height=\"" << kPanel
        << "\" viewBox=\"0 0 " << 2 * kPanel << ' ' << kPanel << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << kPanel << "\" y1=\"0\" x2=\"" << kPanel << "\" y2=\"" << kPanel
        << "\" stroke=\"#ccc\"/>\n";

    for (const auto& [s, t] : vertex_map) {
        if (!a.contains(s) || !b.contains(t)) continue;
        used_a.insert(s);
        used_b.insert(t);
        const bool ok = truth.contains({s, t});
        auto [x1, y1] = vs.screen(a[s], 0.0);
        auto [x2, y2] = vt.screen(b[t], kPanel);
        svg << "<line class=\"" << (ok ? "correct" : "incorrect") << "\" x1=\"" << x1 << "\" y1=\"" << y1
            << "\" x2=\"" << x2 << "\" y2=\"" << y2 << "\" stroke=\"" << (ok ? "green" : "red")
            << "\" stroke-width=\"1\"/>\n";
    }
    auto dots = [&](const std::map<int, Vec3>& pts, const View& view, double left, const std::set<int>& used) {
        for (const auto& [id, x] : pts) {
            auto [cx, cy] = view.screen(x, left);
            const bool matched = used.contains(id);
            svg << "<circle class=\"" << (matched ? "matched" : "unmatched") << "\" data-id=\"" << id << "\" cx=\""
                << cx << "\" cy=\"" << cy << "\" r=\"3\" fill=\"" << (matched ? "black" : "none")
                << "\" stroke=\"black\"/>\n";
        }
    };
    dots(a, vs, 0.0, used_a);
    dots(b, vt, kPanel, used_b);
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace smatch
