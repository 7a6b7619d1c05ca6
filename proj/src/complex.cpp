#include "smatch/complex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace smatch {

bool GeodesicGraph::has_edge(int u, int v) const {
    const Edge e = std::minmax(u, v);
    return std::binary_search(edges.begin(), edges.end(), e);
}

std::vector<std::vector<int>> GeodesicGraph::adjacency() const {
    std::vector<std::vector<int>> adj(vertices.size());
    for (const auto& [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return adj;
}

int GeodesicGraph::max_degree() const {
    std::vector<int> degree(vertices.size(), 0);
    for (const auto& [u, v] : edges) {
        ++degree[u];
        ++degree[v];
    }
    return degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
}

std::vector<std::vector<int>> knn_sets(const GeodesicGraph& graph, int k) {
    const int n = static_cast<int>(graph.vertex_count());
    if (k < 1) throw InvalidArgument("k must be >= 1");
    if (k > n) throw KTooLarge(static_cast<std::size_t>(k), static_cast<std::size_t>(n));

    std::vector<std::vector<int>> sets(n);
    std::vector<int> order(n);
    for (int u = 0; u < n; ++u) {
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
            const double da = graph.distances(u, a);
            const double db = graph.distances(u, b);
            if (da != db) return da < db;
            return graph.vertices[a].id < graph.vertices[b].id;
        });
        sets[u].assign(order.begin(), order.begin() + k);
        std::sort(sets[u].begin(), sets[u].end());
    }
    return sets;
}

GeodesicGraph build_graph(std::vector<SurfacePoint> points, Eigen::MatrixXd distances, int k) {
    GeodesicGraph g;
    g.vertices = std::move(points);
    g.distances = std::move(distances);
    g.k = k;
    const int n = static_cast<int>(g.vertex_count());
    if (g.distances.rows() != n || g.distances.cols() != n)
        throw ShapeMismatch("distance matrix does not match the vertex count");

    const auto neighborhoods = knn_sets(g, k);
    // N_k(u) and N_k(v) intersect iff some w lies in both, so every set of vertices
    // whose neighbourhoods contain a common w is a clique of the graph.
    std::vector<std::vector<int>> holders(n);
    for (int u = 0; u < n; ++u)
        for (int w : neighborhoods[u]) holders[w].push_back(u);

    std::vector<Edge> edges;
    for (const auto& group : holders)
        for (std::size_t a = 0; a < group.size(); ++a)
            for (std::size_t b = a + 1; b < group.size(); ++b)
                edges.emplace_back(std::minmax(group[a], group[b]));
    return with_edges(g, std::move(edges));
}

GeodesicGraph build_graph(std::span<const SurfacePoint> points, const Manifold& manifold, int k) {
    if (k < 1) throw InvalidArgument("k must be >= 1");
    if (static_cast<std::size_t>(k) > points.size()) throw KTooLarge(static_cast<std::size_t>(k), points.size());
    return build_graph(std::vector<SurfacePoint>(points.begin(), points.end()),
                       manifold.pairwise_distances(points), k);
}

GeodesicGraph with_edges(const GeodesicGraph& graph, std::vector<Edge> edges) {
    GeodesicGraph g = graph;
    const int n = static_cast<int>(g.vertex_count());
    for (auto& e : edges) {
        if (e.first < 0 || e.second < 0 || e.first >= n || e.second >= n)
            throw InvalidArgument("edge endpoint out of range");
        e = std::minmax(e.first, e.second);
    }
    std::erase_if(edges, [](const Edge& e) { return e.first == e.second; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.edges = std::move(edges);
    return g;
}

Eigen::MatrixXi BoundaryMatrix::dense() const {
    Eigen::MatrixXi m = Eigen::MatrixXi::Zero(rows, cols());
    for (int j = 0; j < cols(); ++j)
        for (int i : columns[j]) m(i, j) = 1;
    return m;
}

int SkeletonComplex::index_of(const Simplex& s) const {
    const int d = static_cast<int>(s.size()) - 1;
    if (d < 0 || d >= static_cast<int>(simplices.size())) return -1;
    const auto& list = simplices[d];
    auto it = std::lower_bound(list.begin(), list.end(), s);
    return it != list.end() && *it == s ? static_cast<int>(it - list.begin()) : -1;
}

std::vector<int> SkeletonComplex::ids(const Simplex& s) const {
    std::vector<int> out;
    out.reserve(s.size());
    for (int v : s) out.push_back(vertices[v].id);
    return out;
}

Vec3 SkeletonComplex::barycenter_of(const Simplex& s) const {
    if (s.empty()) throw EmptySimplex();
    Vec3 sum = Vec3::Zero();
    for (int v : s) sum += vertices[v].xyz;
    return sum / static_cast<double>(s.size());
}

std::size_t SkeletonComplex::total_simplices() const {
    std::size_t total = 0;
    for (const auto& list : simplices) total += list.size();
    return total;
}

namespace {

void bron_kerbosch(std::vector<int>& clique, std::vector<int> candidates, std::vector<int> excluded,
                   const std::vector<std::vector<int>>& adj, std::vector<std::vector<int>>& out) {
    if (candidates.empty() && excluded.empty()) {
        out.push_back(clique);
        return;
    }
    auto neighbours_in = [&](int u, const std::vector<int>& set) {
        std::vector<int> r;
        std::set_intersection(set.begin(), set.end(), adj[u].begin(), adj[u].end(), std::back_inserter(r));
        return r;
    };
    // Pivot: the vertex of P u X with the most neighbours in P.
    int pivot = -1;
    std::size_t best = 0;
    for (const auto* set : {&candidates, &excluded})
        for (int u : *set) {
            const std::size_t c = neighbours_in(u, candidates).size();
            if (pivot < 0 || c > best) {
                pivot = u;
                best = c;
            }
        }
    std::vector<int> branch;
    std::set_difference(candidates.begin(), candidates.end(), adj[pivot].begin(), adj[pivot].end(),
                        std::back_inserter(branch));
    for (int v : branch) {
        clique.push_back(v);
        bron_kerbosch(clique, neighbours_in(v, candidates), neighbours_in(v, excluded), adj, out);
        clique.pop_back();
        candidates.erase(std::lower_bound(candidates.begin(), candidates.end(), v));
        excluded.insert(std::lower_bound(excluded.begin(), excluded.end(), v), v);
    }
}

void expand_subsets(const std::vector<int>& clique, int max_size, std::vector<std::vector<Simplex>>& out) {
    const int c = static_cast<int>(clique.size());
    Simplex current;
    auto recurse = [&](auto&& self, int start) -> void {
        if (!current.empty()) out[current.size() - 1].push_back(current);
        if (static_cast<int>(current.size()) == max_size) return;
        for (int i = start; i < c; ++i) {
            current.push_back(clique[i]);
            self(self, i + 1);
            current.pop_back();
        }
    };
    recurse(recurse, 0);
}

}  // namespace

std::vector<std::vector<Simplex>> enumerate_cliques(const std::vector<std::vector<int>>& adjacency,
                                                    int max_size) {
    const int n = static_cast<int>(adjacency.size());
    std::vector<std::vector<int>> maximal;
    std::vector<int> clique;
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    bron_kerbosch(clique, all, {}, adjacency, maximal);

    std::vector<std::vector<Simplex>> out(static_cast<std::size_t>(std::max(max_size, 1)));
    for (auto& c : maximal) {
        std::sort(c.begin(), c.end());
        expand_subsets(c, max_size, out);
    }
    for (auto& list : out) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

SkeletonComplex build_complex(const GeodesicGraph& graph, int h_max) {
    if (h_max < 1) throw InvalidArgument("h_max must be >= 1");
    SkeletonComplex k;
    k.vertices = graph.vertices;
    k.simplices = enumerate_cliques(graph.adjacency(), h_max + 1);
    if (k.simplices.empty()) k.simplices.emplace_back();
    k.h = static_cast<int>(k.simplices.size()) - 1;

    for (int p = 1; p <= k.h; ++p) {
        BoundaryMatrix m;
        m.p = p;
        m.rows = static_cast<int>(k.simplices[p - 1].size());
        m.columns.reserve(k.simplices[p].size());
        for (const auto& s : k.simplices[p]) {
            std::vector<int> facets;
            facets.reserve(s.size());
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                Simplex f;
                f.reserve(s.size() - 1);
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (i != drop) f.push_back(s[i]);
                facets.push_back(k.index_of(f));
            }
            m.columns.push_back(std::move(facets));
        }
        k.boundary.push_back(std::move(m));
    }
    return k;
}

double clique_bound(long n, long m, int delta, int h) {
    if (delta < 1 || h < 1 || m < 0 || n < 0) throw InvalidArgument("clique_bound needs delta>=1, h>=1, n,m>=0");
    // No clique has more than delta + 1 vertices, and the binomial-sum estimate below
    // only holds for h <= delta + 1.
    h = std::min(h, delta + 1);
    const double d1 = static_cast<double>(delta) + 1.0;
    const double partial = std::min(std::pow(d1, h) + 1.0, std::pow(std::exp(1.0) * d1 / h, h));
    return static_cast<double>(n) +
           2.0 * static_cast<double>(m) / (static_cast<double>(delta) * d1) * (partial - delta - 2.0);
}

nlohmann::json complex_to_json(const SkeletonComplex& complex) {
    nlohmann::json out = nlohmann::json::object();
    for (std::size_t d = 0; d < complex.simplices.size(); ++d) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& s : complex.simplices[d]) list.push_back(complex.ids(s));
        out[std::to_string(d)] = std::move(list);
    }
    return out;
}

}  // namespace smatch
