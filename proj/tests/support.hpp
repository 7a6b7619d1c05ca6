#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "smatch/solver.hpp"

namespace smatch::testing {

/// Cost matrix over every (src, tgt) pair from a dense pair-space matrix.
inline LevelCostMatrix dense_cost_matrix(int n_src, int n_tgt, const Eigen::MatrixXd& L) {
    LevelCostMatrix c;
    c.p = 1;
    c.n_src = n_src;
    c.n_tgt = n_tgt;
    c.pairs = all_pairs(n_src, n_tgt);
    // Keep every entry stored so zero costs become affinity 1.
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index r = 0; r < L.rows(); ++r)
        for (Eigen::Index s = 0; s < L.cols(); ++s) t.emplace_back(static_cast<int>(r), static_cast<int>(s), L(r, s));
    c.entries.resize(L.rows(), L.cols());
    c.entries.setFromTriplets(t.begin(), t.end());
    return c;
}

/// Well-separated instance: pairs of the planted permutation and their mutual
/// entries cost at most `noise`; everything else costs 1 + noise-level jitter.
inline Eigen::MatrixXd planted_costs(int n, const std::vector<int>& perm, double noise, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, noise);
    const int m = n * n;
    Eigen::MatrixXd L(m, m);
    auto planted = [&](int a) { return perm[a / n] == a % n; };
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            const double v = planted(a) && planted(b) ? u(rng) : 1.0 + u(rng);
            L(a, b) = L(b, a) = v;
        }
    return L;
}

/// x^T L x of a selection of pair indices.
inline double quadratic_cost(const Eigen::MatrixXd& L, const std::vector<int>& sel) {
    double s = 0.0;
    for (int a : sel)
        for (int b : sel) s += L(a, b);
    return s;
}

/// Exhaustive minimum of x^T L x over full permutations (n_src == n_tgt == n).
inline std::pair<double, std::vector<int>> brute_force_permutation(int n, const Eigen::MatrixXd& L) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> arg;
    do {
        std::vector<int> sel;
        for (int i = 0; i < n; ++i) sel.push_back(i * n + perm[i]);
        const double c = quadratic_cost(L, sel);
        if (c < best) {
            best = c;
            arg = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {best, arg};
}

inline bool is_partial_injection(const std::vector<MatchedPair>& pairs) {
    std::set<int> s, t;
    for (const auto& p : pairs)
        if (!s.insert(p.src).second || !t.insert(p.tgt).second) return false;
    return true;
}

}  // namespace smatch::testing
