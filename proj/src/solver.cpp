#include "smatch/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace smatch {

namespace {

/// facet row -> columns (cofaces) of a boundary matrix.
std::vector<std::vector<int>> cofaces(const BoundaryMatrix& m) {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(m.rows));
    for (int j = 0; j < m.cols(); ++j)
        for (int i : m.columns[j]) out[i].push_back(j);
    return out;
}

std::uint64_t pair_key(int a, int b) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

}  // namespace

int LevelCostMatrix::index_of(int src, int tgt) const {
    const CandidatePair key{src, tgt};
    auto it = std::lower_bound(pairs.begin(), pairs.end(), key);
    return it != pairs.end() && *it == key ? static_cast<int>(it - pairs.begin()) : -1;
}

std::vector<CandidatePair> all_pairs(int n_src, int n_tgt) {
    std::vector<CandidatePair> out;
    out.reserve(static_cast<std::size_t>(n_src) * static_cast<std::size_t>(n_tgt));
    for (int s = 0; s < n_src; ++s)
        for (int t = 0; t < n_tgt; ++t) out.push_back({s, t});
    return out;
}

LevelCostMatrix build_cost_matrix(const BoundaryMatrix& src_boundary, const BoundaryMatrix& tgt_boundary,
                                  const LevelDescriptors& src_desc, const LevelDescriptors& tgt_desc,
                                  std::vector<CandidatePair> candidates, const PairCosts* carried) {
    if (src_boundary.p != tgt_boundary.p || src_desc.p != src_boundary.p || tgt_desc.p != tgt_boundary.p)
        throw ShapeMismatch("boundary matrices and descriptors belong to different levels");
    if (static_cast<int>(src_desc.upper.size()) != src_boundary.cols() ||
        static_cast<int>(src_desc.lower.size()) != src_boundary.rows ||
        static_cast<int>(tgt_desc.upper.size()) != tgt_boundary.cols() ||
        static_cast<int>(tgt_desc.lower.size()) != tgt_boundary.rows)
        throw ShapeMismatch("descriptor tables do not cover the boundary matrix index ranges");

    LevelCostMatrix L;
    L.p = src_boundary.p;
    L.n_src = src_boundary.cols();
    L.n_tgt = tgt_boundary.cols();
    if (candidates.empty()) candidates = all_pairs(L.n_src, L.n_tgt);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (const auto& c : candidates)
        if (c.src < 0 || c.src >= L.n_src || c.tgt < 0 || c.tgt >= L.n_tgt)
            throw ShapeMismatch("candidate pair outside the boundary matrix ranges");
    L.pairs = std::move(candidates);

    std::unordered_map<std::uint64_t, int> lookup;
    lookup.reserve(L.pairs.size() * 2);
    for (std::size_t a = 0; a < L.pairs.size(); ++a) lookup.emplace(pair_key(L.pairs[a].src, L.pairs[a].tgt), static_cast<int>(a));

    const auto src_cof = cofaces(src_boundary);
    const auto tgt_cof = cofaces(tgt_boundary);

    std::vector<Eigen::Triplet<double>> triplets;
    auto facet_cost = [&](int i, int ip) {
        auto [it, inserted] = L.facet_costs.try_emplace({i, ip}, 0.0);
        if (inserted) it->second = descriptor_distance(src_desc.lower[i], tgt_desc.lower[ip]);
        return it->second;
    };

    for (std::size_t a = 0; a < L.pairs.size(); ++a) {
        const auto [k, kp] = L.pairs[a];
        double diag = descriptor_distance(src_desc.upper[k], tgt_desc.upper[kp]);
        if (carried) {
            auto it = carried->find({k, kp});
            if (it != carried->end()) diag += it->second;
        }
        triplets.emplace_back(static_cast<int>(a), static_cast<int>(a), std::max(diag, 0.0));

        for (int i : src_boundary.columns[k])
            for (int ip : tgt_boundary.columns[kp])
                for (int l : src_cof[i]) {
                    if (l == k) continue;
                    for (int lp : tgt_cof[ip]) {
                        if (lp == kp) continue;
                        auto it = lookup.find(pair_key(l, lp));
                        if (it == lookup.end()) continue;
                        triplets.emplace_back(static_cast<int>(a), it->second, facet_cost(i, ip));
                    }
                }
    }
    const auto n = static_cast<Eigen::Index>(L.pairs.size());
    L.entries.resize(n, n);
    L.entries.setFromTriplets(triplets.begin(), triplets.end());
    L.entries.makeCompressed();
    return L;
}

SparseMatrix cost_to_affinity(const LevelCostMatrix& costs, double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
    SparseMatrix w = costs.entries;
    const double inv = 1.0 / (sigma * sigma);
    for (Eigen::Index r = 0; r < w.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(w, r); it; ++it) it.valueRef() = std::exp(-it.value() * it.value() * inv);
    return w;
}

double median_positive_cost(const LevelCostMatrix& costs) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(costs.entries.nonZeros()));
    for (Eigen::Index r = 0; r < costs.entries.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(costs.entries, r); it; ++it)
            if (it.value() > 0.0) values.push_back(it.value());
    if (values.empty()) return 1.0;
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
}

namespace {

/// Principal eigenvector of every connected component of W restricted to `active`,
/// each scaled so its largest entry equals the component's Rayleigh quotient.
void component_scores(const SparseMatrix& w, const std::vector<char>& active, const SpectralOptions& options,
                      Eigen::VectorXd& scores, SpectralResult& result) {
    const auto n = w.rows();
    std::vector<int> component(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> members;
    for (Eigen::Index s = 0; s < n; ++s) {
        if (!active[s] || component[s] >= 0) continue;
        const int c = static_cast<int>(members.size());
        members.emplace_back();
        std::vector<int> stack{static_cast<int>(s)};
        component[s] = c;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            members[c].push_back(v);
            for (SparseMatrix::InnerIterator it(w, v); it; ++it) {
                const auto u = static_cast<int>(it.col());
                if (active[u] && component[u] < 0) {
                    component[u] = c;
                    stack.push_back(u);
                }
            }
        }
    }

    // Shifted power iteration (W + I); the shift leaves the principal eigenvector
    // unchanged and keeps bipartite-like patterns from oscillating.
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n), y = Eigen::VectorXd::Zero(n);
    for (auto& group : members) {
        std::sort(group.begin(), group.end());
        const double start = 1.0 / std::sqrt(static_cast<double>(group.size()));
        for (int v : group) x[v] = start;
        bool converged = false;
        int iter = 0;
        for (; iter < options.max_iterations; ++iter) {
            double norm2 = 0.0;
            for (int v : group) {
                double acc = x[v];
                for (SparseMatrix::InnerIterator it(w, v); it; ++it)
                    if (active[it.col()]) acc += it.value() * x[it.col()];
                y[v] = acc;
                norm2 += acc * acc;
            }
            const double norm = std::sqrt(norm2);
            double change = 0.0;
            for (int v : group) {
                y[v] = norm > 0.0 ? y[v] / norm : 0.0;
                change = std::max(change, std::abs(y[v] - x[v]));
                x[v] = y[v];
            }
            if (change < options.tolerance) {
                converged = true;
                ++iter;
                break;
            }
        }
        result.converged = result.converged && converged;
        result.iterations = std::max(result.iterations, iter);

        double rayleigh = 0.0;
        double peak = 0.0;
        for (int v : group) {
            double acc = 0.0;
            for (SparseMatrix::InnerIterator it(w, v); it; ++it)
                if (active[it.col()]) acc += it.value() * x[it.col()];
            rayleigh += x[v] * acc;
            peak = std::max(peak, x[v]);
        }
        for (int v : group) scores[v] = peak > 0.0 ? rayleigh * x[v] / peak : 0.0;
    }
}

/// Pairwise-exchange refinement of a one-to-one selection: repeatedly applies the
/// first move that strictly increases x^T W x, where a move either re-targets one
/// selected pair to a free target (or free source) or exchanges the targets of two
/// selected pairs. The selection size never changes.
void refine_selection(const SparseMatrix& w, std::span<const CandidatePair> pairs, std::vector<int>& selected,
                      int max_passes) {
    const auto n = static_cast<int>(pairs.size());
    if (selected.empty()) return;
    std::unordered_map<std::uint64_t, int> index;
    index.reserve(pairs.size());
    std::unordered_map<int, std::vector<int>> by_src, by_tgt;
    for (int a = 0; a < n; ++a) {
        index[pair_key(pairs[a].src, pairs[a].tgt)] = a;
        by_src[pairs[a].src].push_back(a);
        by_tgt[pairs[a].tgt].push_back(a);
    }
    std::vector<char> in(static_cast<std::size_t>(n), 0);
    std::unordered_map<int, int> src_of, tgt_of;  // src -> pair, tgt -> pair
    for (int a : selected) {
        in[a] = 1;
        src_of[pairs[a].src] = a;
        tgt_of[pairs[a].tgt] = a;
    }
    // Affinity of pair x with the current selection, excluding the listed pairs.
    auto link = [&](int x, int skip1, int skip2) {
        double acc = 0.0;
        for (SparseMatrix::InnerIterator it(w, x); it; ++it) {
            const auto c = static_cast<int>(it.col());
            if (in[c] && c != x && c != skip1 && c != skip2) acc += it.value();
        }
        return acc;
    };
    auto find = [&](int src, int tgt) {
        auto it = index.find(pair_key(src, tgt));
        return it == index.end() ? -1 : it->second;
    };
    auto remove = [&](int out) {
        in[out] = 0;
        src_of.erase(pairs[out].src);
        tgt_of.erase(pairs[out].tgt);
    };
    auto insert = [&](int add) {
        in[add] = 1;
        src_of[pairs[add].src] = add;
        tgt_of[pairs[add].tgt] = add;
    };

    for (int pass = 0; pass < max_passes; ++pass) {
        bool improved = false;
        std::vector<int> current;
        for (int a = 0; a < n; ++a)
            if (in[a]) current.push_back(a);
        for (int a : current) {
            if (!in[a]) continue;
            const double scale = std::max(1.0, w.coeff(a, a));
            const double base_a = link(a, -1, -1);
            // Re-target (s,t) -> (s,v) or (u,t), or exchange with the pair holding v / u.
            auto try_moves = [&](const std::vector<int>& alternatives) {
                for (int x : alternatives) {
                    if (x == a || in[x]) continue;
                    const int s = pairs[a].src, t = pairs[a].tgt;
                    const bool same_src = pairs[x].src == s;
                    auto holder = same_src ? tgt_of.find(pairs[x].tgt) : src_of.find(pairs[x].src);
                    const bool free = same_src ? holder == tgt_of.end() : holder == src_of.end();
                    if (free) {
                        const double delta = 2.0 * (link(x, a, -1) - base_a) + w.coeff(x, x) - w.coeff(a, a);
                        if (delta > 1e-12 * scale) {
                            remove(a);
                            insert(x);
                            return true;
                        }
                        continue;
                    }
                    const int b = holder->second;
                    const int y = same_src ? find(pairs[b].src, t) : find(s, pairs[b].tgt);
                    if (y < 0) continue;
                    const double before = 2.0 * (link(a, b, -1) + link(b, a, -1)) + w.coeff(a, a) + w.coeff(b, b) +
                                          2.0 * w.coeff(a, b);
                    const double after = 2.0 * (link(x, a, b) + link(y, a, b)) + w.coeff(x, x) + w.coeff(y, y) +
                                         2.0 * w.coeff(x, y);
                    if (after - before > 1e-12 * scale) {
                        remove(a);
                        remove(b);
                        insert(x);
                        insert(y);
                        return true;
                    }
                }
                return false;
            };
            if (try_moves(by_src[pairs[a].src]) || try_moves(by_tgt[pairs[a].tgt])) improved = true;
        }
        if (!improved) break;
    }
    std::vector<int> out;
    for (int a : selected)
        if (in[a]) out.push_back(a);
    for (int a = 0; a < n; ++a)
        if (in[a] && std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    selected = std::move(out);
}

}  // namespace

SpectralResult spectral_match(const SparseMatrix& affinity, std::span<const CandidatePair> pairs,
                              const SpectralOptions& options) {
    const auto n = static_cast<Eigen::Index>(pairs.size());
    if (affinity.rows() != n || affinity.cols() != n)
        throw ShapeMismatch("affinity matrix does not match the candidate list");

    SpectralResult result;
    result.scores = Eigen::VectorXd::Zero(n);
    if (n == 0) return result;

    // The principal eigenvector of a large sparse pair graph concentrates on its
    // densest region and decays geometrically away from it, so one greedy pass only
    // settles that region reliably. Each round accepts what clears the threshold,
    // drops the candidates it rules out, and re-solves the rest. A round whose best
    // score falls below the threshold relative to the first round ends the search.
    std::vector<char> active(static_cast<std::size_t>(n), 1);
    std::unordered_map<int, bool> used_src, used_tgt;
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(n);
    double first_best = -1.0;
    std::vector<int> order;
    for (;;) {
        scores.setZero();
        component_scores(affinity, active, options, scores, result);
        order.clear();
        for (Eigen::Index a = 0; a < n; ++a)
            if (active[a]) order.push_back(static_cast<int>(a));
        if (order.empty()) break;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
        const double best = scores[order.front()];
        if (first_best < 0.0) first_best = best;
        if (!(best > 0.0) || best < options.relative_threshold * first_best) break;
        const double cutoff = options.relative_threshold * best;

        int accepted = 0;
        for (int a : order) {
            if (!(scores[a] > 0.0) || scores[a] < cutoff) break;
            const auto& c = pairs[a];
            if (used_src.contains(c.src) || used_tgt.contains(c.tgt)) continue;
            used_src[c.src] = true;
            used_tgt[c.tgt] = true;
            result.selected.push_back(a);
            result.scores[a] = scores[a];
            ++accepted;
        }
        if (accepted == 0) break;
        for (Eigen::Index a = 0; a < n; ++a) {
            if (!active[a]) continue;
            if (used_src.contains(pairs[a].src) || used_tgt.contains(pairs[a].tgt)) {
                active[a] = 0;
                if (result.scores[a] == 0.0) result.scores[a] = scores[a];
            }
        }
        ++result.rounds;
    }
    for (Eigen::Index a = 0; a < n; ++a)
        if (active[a]) result.scores[a] = scores[a];
    if (options.refine_passes > 0) refine_selection(affinity, pairs, result.selected, options.refine_passes);
    return result;
}

LevelAssignment evaluate_assignment(const LevelCostMatrix& costs, std::span<const int> selected) {
    LevelAssignment out;
    out.p = costs.p;
    std::vector<char> chosen(costs.pairs.size(), 0);
    for (int a : selected) chosen[a] = 1;
    std::vector<int> sorted(selected.begin(), selected.end());
    std::sort(sorted.begin(), sorted.end());
    for (int a : sorted) {
        double cost = 0.0;
        for (SparseMatrix::InnerIterator it(costs.entries, a); it; ++it)
            if (chosen[it.col()]) cost += it.value();
        out.pairs.push_back({costs.pairs[a].src, costs.pairs[a].tgt, cost});
        out.objective += cost;
    }
    return out;
}

LevelSolve solve_level(const LevelCostMatrix& costs, std::optional<double> sigma, std::span<const int> fixed,
                       const SpectralOptions& options) {
    LevelSolve out;
    out.sigma = sigma.value_or(median_positive_cost(costs));
    const SparseMatrix w = cost_to_affinity(costs, out.sigma);

    std::unordered_map<int, bool> taken_src, taken_tgt;
    for (int a : fixed) {
        taken_src[costs.pairs[a].src] = true;
        taken_tgt[costs.pairs[a].tgt] = true;
    }
    std::vector<int> active;
    for (std::size_t a = 0; a < costs.pairs.size(); ++a)
        if (!taken_src.contains(costs.pairs[a].src) && !taken_tgt.contains(costs.pairs[a].tgt))
            active.push_back(static_cast<int>(a));

    std::vector<int> selected(fixed.begin(), fixed.end());
    if (active.size() == costs.pairs.size()) {
        out.spectral = spectral_match(w, costs.pairs, options);
        selected.insert(selected.end(), out.spectral.selected.begin(), out.spectral.selected.end());
    } else if (!active.empty()) {
        std::vector<int> local(costs.pairs.size(), -1);
        for (std::size_t i = 0; i < active.size(); ++i) local[active[i]] = static_cast<int>(i);
        std::vector<Eigen::Triplet<double>> triplets;
        std::vector<CandidatePair> sub_pairs;
        for (std::size_t i = 0; i < active.size(); ++i) {
            sub_pairs.push_back(costs.pairs[active[i]]);
            for (SparseMatrix::InnerIterator it(w, active[i]); it; ++it)
                if (local[it.col()] >= 0) triplets.emplace_back(static_cast<int>(i), local[it.col()], it.value());
        }
        SparseMatrix sub(static_cast<Eigen::Index>(active.size()), static_cast<Eigen::Index>(active.size()));
        sub.setFromTriplets(triplets.begin(), triplets.end());
        out.spectral = spectral_match(sub, sub_pairs, options);
        for (int& s : out.spectral.selected) s = active[s];
        selected.insert(selected.end(), out.spectral.selected.begin(), out.spectral.selected.end());
    }
    out.assignment = evaluate_assignment(costs, selected);
    return out;
}

}  // namespace smatch
