#include "smatch/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>

namespace smatch {

void MatchParams::validate() const {
    if (k < 1) throw InvalidArgument("k must be >= 1");
    if (h_max < 1) throw InvalidArgument("h_max must be >= 1");
    if (sigma && !(*sigma > 0.0)) throw InvalidArgument("sigma must be positive");
    if (!(sigma_scale > 0.0)) throw InvalidArgument("sigma_scale must be positive");
    if (!(elim_quantile >= 0.0 && elim_quantile < 1.0)) throw InvalidArgument("elim_quantile must lie in [0, 1)");
    if (!(unmatched_threshold >= 0.0 && unmatched_threshold < 1.0))
        throw InvalidArgument("unmatched_threshold must lie in [0, 1)");
    if (candidates_per_simplex < 0) throw InvalidArgument("candidates_per_simplex must be >= 0");
    if (!(coupling >= 0.0)) throw InvalidArgument("coupling must be >= 0");
    if (expansion_rounds < 0) throw InvalidArgument("expansion_rounds must be >= 0");
    if (refine_passes < 0) throw InvalidArgument("refine_passes must be >= 0");
    if (!(seed_floor <= 0.0)) throw InvalidArgument("seed_floor must be <= 0");
}

nlohmann::json to_json(const MatchParams& p) {
    nlohmann::json j;
    j["k"] = p.k;
    j["h_max"] = p.h_max;
    if (p.sigma)
        j["sigma"] = *p.sigma;
    else
        j["sigma"] = "median";
    j["sigma_scale"] = p.sigma_scale;
    j["elim_quantile"] = p.elim_quantile;
    j["unmatched_threshold"] = p.unmatched_threshold;
    j["seed"] = p.seed;
    j["candidates_per_simplex"] = p.candidates_per_simplex;
    j["coupling"] = p.coupling;
    j["seed_floor"] = p.seed_floor;
    j["refine_passes"] = p.refine_passes;
    j["expansion_rounds"] = p.expansion_rounds;
    j["restrict_to_support"] = p.restrict_to_support;
    return j;
}

MatchParams match_params_from_json(const nlohmann::json& j) {
    MatchParams p;
    p.k = j.value("k", p.k);
    p.h_max = j.value("h_max", p.h_max);
    if (j.contains("sigma") && !j["sigma"].is_string()) p.sigma = j["sigma"].get<double>();
    p.sigma_scale = j.value("sigma_scale", p.sigma_scale);
    p.elim_quantile = j.value("elim_quantile", p.elim_quantile);
    p.unmatched_threshold = j.value("unmatched_threshold", p.unmatched_threshold);
    p.seed = j.value("seed", p.seed);
    p.candidates_per_simplex = j.value("candidates_per_simplex", p.candidates_per_simplex);
    p.coupling = j.value("coupling", p.coupling);
    p.seed_floor = j.value("seed_floor", p.seed_floor);
    p.refine_passes = j.value("refine_passes", p.refine_passes);
    p.expansion_rounds = j.value("expansion_rounds", p.expansion_rounds);
    p.restrict_to_support = j.value("restrict_to_support", p.restrict_to_support);
    p.validate();
    return p;
}

FaceSupport count_face_support(const LevelAssignment& assignment, const BoundaryMatrix& src_boundary,
                               const BoundaryMatrix& tgt_boundary) {
    FaceSupport support;
    for (const auto& m : assignment.pairs)
        for (int i : src_boundary.columns.at(m.src))
            for (int ip : tgt_boundary.columns.at(m.tgt)) ++support[{i, ip}];
    return support;
}

PairCosts induce_face_costs(const LevelAssignment& assignment, const BoundaryMatrix& src_boundary,
                            const BoundaryMatrix& tgt_boundary, double lambda, double floor) {
    PairCosts seed;
    for (const auto& [key, count] : count_face_support(assignment, src_boundary, tgt_boundary))
        seed[key] = std::max(-lambda * count, floor);
    return seed;
}

std::vector<std::pair<int, int>> eliminate_settled(const FaceSupport& support, const PairCosts& seeded_costs,
                                                   double quantile) {
    std::vector<std::pair<int, int>> out;
    if (quantile <= 0.0 || support.empty()) return out;

    std::map<int, std::pair<int, int>> best_src;  // source -> (max support, multiplicity)
    std::map<int, std::pair<int, int>> best_tgt;
    auto note = [](std::map<int, std::pair<int, int>>& best, int key, int count) {
        auto [it, inserted] = best.try_emplace(key, count, 1);
        if (inserted) return;
        if (count > it->second.first)
            it->second = {count, 1};
        else if (count == it->second.first)
            ++it->second.second;
    };
    for (const auto& [key, count] : support) {
        note(best_src, key.first, count);
        note(best_tgt, key.second, count);
    }

    std::vector<std::pair<double, std::pair<int, int>>> ranked;
    for (const auto& [key, count] : support) {
        auto it = seeded_costs.find(key);
        if (it != seeded_costs.end()) ranked.emplace_back(it->second, key);
    }
    std::sort(ranked.begin(), ranked.end());
    const auto take = static_cast<std::size_t>(std::floor(quantile * static_cast<double>(ranked.size())));
    for (std::size_t r = 0; r < take && r < ranked.size(); ++r) {
        const auto key = ranked[r].second;
        const int count = support.at(key);
        const auto& s = best_src.at(key.first);
        const auto& t = best_tgt.at(key.second);
        if (s.first == count && s.second == 1 && t.first == count && t.second == 1) out.push_back(key);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<int, int>> vertex_assignment(const LevelAssignment& edges, const SkeletonComplex& src,
                                                   const SkeletonComplex& tgt,
                                                   const std::vector<AffineDescriptor>& src_vertex_desc,
                                                   const std::vector<AffineDescriptor>& tgt_vertex_desc) {
    std::map<std::pair<int, int>, double> votes;  // vertex indices
    for (const auto& m : edges.pairs) {
        const auto& e = src.simplices.at(1).at(m.src);
        const auto& f = tgt.simplices.at(1).at(m.tgt);
        auto d = [&](int u, int up) { return descriptor_distance(src_vertex_desc[u], tgt_vertex_desc[up]); };
        const double straight = d(e[0], f[0]) + d(e[1], f[1]);
        const double crossed = d(e[0], f[1]) + d(e[1], f[0]);
        if (straight < crossed) {
            votes[{e[0], f[0]}] += 1.0;
            votes[{e[1], f[1]}] += 1.0;
        } else if (crossed < straight) {
            votes[{e[0], f[1]}] += 1.0;
            votes[{e[1], f[0]}] += 1.0;
        } else {
            votes[{e[0], f[0]}] += 0.5;
            votes[{e[1], f[1]}] += 0.5;
            votes[{e[0], f[1]}] += 0.5;
            votes[{e[1], f[0]}] += 0.5;
        }
    }

    struct Ballot {
        double votes;
        int src_id, tgt_id, src, tgt;
    };
    std::vector<Ballot> ballots;
    ballots.reserve(votes.size());
    for (const auto& [key, v] : votes)
        ballots.push_back({v, src.vertices[key.first].id, tgt.vertices[key.second].id, key.first, key.second});
    std::sort(ballots.begin(), ballots.end(), [](const Ballot& a, const Ballot& b) {
        if (a.votes != b.votes) return a.votes > b.votes;
        if (a.src_id != b.src_id) return a.src_id < b.src_id;
        return a.tgt_id < b.tgt_id;
    });

    std::set<int> used_src, used_tgt;
    std::vector<std::pair<int, int>> out;
    for (const auto& b : ballots) {
        if (used_src.contains(b.src) || used_tgt.contains(b.tgt)) continue;
        used_src.insert(b.src);
        used_tgt.insert(b.tgt);
        out.emplace_back(b.src_id, b.tgt_id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

struct CandidateSelection {
    std::vector<CandidatePair> pairs;
    double mean_positive = 0.0;
};

/// Canonical profiles of the listed descriptors as zero-padded rows.
Eigen::MatrixXd profile_matrix(const std::vector<AffineDescriptor>& desc, const std::vector<int>& rows,
                               Eigen::Index width) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), width);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& c = desc[rows[r]].canonical;
        for (std::size_t i = 0; i < c.size(); ++i) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = c[i];
    }
    return m;
}

/// Top-`per_simplex` targets of every source and top sources of every target by
/// p-simplex descriptor distance, skipping excluded simplices. Distances come from
/// blocked Gram products of the zero-padded canonical profiles, which equals the
/// canonical-profile distance up to rounding; distances below 1e-9 count as zero
/// for the mean.
CandidateSelection select_candidates(const std::vector<AffineDescriptor>& src, const std::vector<AffineDescriptor>& tgt,
                                     int per_simplex, const std::set<int>& skip_src, const std::set<int>& skip_tgt) {
    std::vector<int> rows, cols;
    for (int i = 0; i < static_cast<int>(src.size()); ++i)
        if (src[i].valid() && !skip_src.contains(i)) rows.push_back(i);
    for (int j = 0; j < static_cast<int>(tgt.size()); ++j)
        if (tgt[j].valid() && !skip_tgt.contains(j)) cols.push_back(j);

    CandidateSelection out;
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto nc = static_cast<Eigen::Index>(cols.size());
    if (nr == 0 || nc == 0) return out;

    std::size_t width = 1;
    for (int r : rows) width = std::max(width, src[r].canonical.size());
    for (int c : cols) width = std::max(width, tgt[c].canonical.size());
    const Eigen::MatrixXd A = profile_matrix(src, rows, static_cast<Eigen::Index>(width));
    const Eigen::MatrixXd B = profile_matrix(tgt, cols, static_cast<Eigen::Index>(width));
    const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
    const Eigen::VectorXd b2 = B.rowwise().squaredNorm();

    const bool everything = per_simplex <= 0 || per_simplex >= std::max(nr, nc);
    const auto keep_r = std::min<Eigen::Index>(per_simplex, nc);
    const auto keep_c = std::min<Eigen::Index>(per_simplex, nr);
    using Entry = std::pair<double, Eigen::Index>;  // (distance, index), max-heap on both
    std::vector<std::vector<Entry>> col_best(static_cast<std::size_t>(nc));
    std::vector<CandidatePair> chosen;
    std::vector<Entry> row;

    double sum = 0.0;
    long positive = 0;
    constexpr Eigen::Index block = 256;
    for (Eigen::Index r0 = 0; r0 < nr; r0 += block) {
        const Eigen::Index h = std::min(block, nr - r0);
        Eigen::MatrixXd d = -2.0 * A.middleRows(r0, h) * B.transpose();
        d.colwise() += a2.segment(r0, h);
        d.rowwise() += b2.transpose();
        for (Eigen::Index i = 0; i < h; ++i) {
            row.clear();
            for (Eigen::Index c = 0; c < nc; ++c) {
                const double v = std::sqrt(std::max(0.0, d(i, c)));
                if (v > 1e-9) {
                    sum += v;
                    ++positive;
                }
                if (everything) continue;
                row.emplace_back(v, c);
                auto& heap = col_best[c];
                const Entry e{v, r0 + i};
                if (static_cast<Eigen::Index>(heap.size()) < keep_c) {
                    heap.push_back(e);
                    std::push_heap(heap.begin(), heap.end());
                } else if (e < heap.front()) {
                    std::pop_heap(heap.begin(), heap.end());
                    heap.back() = e;
                    std::push_heap(heap.begin(), heap.end());
                }
            }
            if (everything) continue;
            std::nth_element(row.begin(), row.begin() + (keep_r - 1), row.end());
            for (Eigen::Index t = 0; t < keep_r; ++t) chosen.push_back({rows[r0 + i], cols[row[t].second]});
        }
    }
    out.mean_positive = positive > 0 ? sum / static_cast<double>(positive) : 0.0;

    if (everything) {
        for (int r : rows)
            for (int c : cols) out.pairs.push_back({r, c});
        return out;
    }
    for (Eigen::Index c = 0; c < nc; ++c)
        for (const auto& [v, r] : col_best[c]) chosen.push_back({rows[r], cols[c]});
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    out.pairs = std::move(chosen);
    return out;
}

/// p-simplices sharing a facet with each p-simplex.
std::vector<std::vector<int>> facet_neighbors(const BoundaryMatrix& m) {
    std::vector<std::vector<int>> cof(static_cast<std::size_t>(m.rows));
    for (int j = 0; j < m.cols(); ++j)
        for (int i : m.columns[j]) cof[i].push_back(j);
    std::vector<std::vector<int>> out(static_cast<std::size_t>(m.cols()));
    for (int j = 0; j < m.cols(); ++j) {
        for (int i : m.columns[j])
            for (int l : cof[i])
                if (l != j) out[j].push_back(l);
        std::sort(out[j].begin(), out[j].end());
        out[j].erase(std::unique(out[j].begin(), out[j].end()), out[j].end());
    }
    return out;
}

}  // namespace

MatchingResult match_complexes(const SkeletonComplex& src, const SkeletonComplex& tgt, const MatchParams& params) {
    params.validate();
    if (src.count(1) == 0 || tgt.count(1) == 0) throw EmptyComplex("both complexes need at least one edge");

    MatchingResult result;
    result.params = params;
    const int h = std::min({src.h, tgt.h, params.h_max});
    const SpectralOptions spectral{1e-9, 1000, params.unmatched_threshold, params.refine_passes};

    FaceSupport support;  // over pairs of the current level's p-simplices
    for (int p = h; p >= 1; --p) {
        const auto started = std::chrono::steady_clock::now();
        LevelDiagnostics diag;
        diag.p = p;
        diag.src_simplices = static_cast<int>(src.count(p));
        diag.tgt_simplices = static_cast<int>(tgt.count(p));
        if (diag.src_simplices == 0 || diag.tgt_simplices == 0) {
            diag.skipped = true;
            result.diagnostics.push_back(diag);
            support.clear();
            continue;
        }

        const LevelDescriptors src_desc = compute_descriptors(src, p);
        const LevelDescriptors tgt_desc = compute_descriptors(tgt, p);

        // Induced costs from the level above, and the pairs they settle.
        PairCosts seed;
        PairCosts seeded_costs;
        std::vector<std::pair<int, int>> settled;
        std::set<int> skip_src, skip_tgt;
        CandidateSelection selection =
            select_candidates(src_desc.upper, tgt_desc.upper, params.candidates_per_simplex, skip_src, skip_tgt);
        const double scale = selection.mean_positive;
        diag.lambda = params.coupling * scale;
        if (!support.empty()) {
            for (const auto& [key, count] : support) {
                const double s = std::max(-diag.lambda * count, params.seed_floor * scale);
                seed[key] = s;
                seeded_costs[key] = descriptor_distance(src_desc.upper[key.first], tgt_desc.upper[key.second]) + s;
            }
            settled = eliminate_settled(support, seeded_costs, params.elim_quantile);
            for (const auto& [a, b] : settled) {
                skip_src.insert(a);
                skip_tgt.insert(b);
            }
        }
        diag.eliminated = static_cast<int>(settled.size());

        std::set<int> bound_src, bound_tgt;
        if (params.restrict_to_support)
            for (const auto& [key, count] : support) {
                bound_src.insert(key.first);
                bound_tgt.insert(key.second);
            }
        std::vector<CandidatePair> candidates;
        for (const auto& c : selection.pairs)
            if (!skip_src.contains(c.src) && !skip_tgt.contains(c.tgt) && !bound_src.contains(c.src) &&
                !bound_tgt.contains(c.tgt))
                candidates.push_back(c);
        for (const auto& [key, count] : support)
            if (!skip_src.contains(key.first) && !skip_tgt.contains(key.second))
                candidates.push_back({key.first, key.second});
        for (const auto& [a, b] : settled) candidates.push_back({a, b});

        if (candidates.empty()) {
            diag.skipped = true;
            result.diagnostics.push_back(diag);
            support.clear();
            continue;
        }

        const BoundaryMatrix& src_m = src.boundary_matrix(p);
        const BoundaryMatrix& tgt_m = tgt.boundary_matrix(p);
        LevelCostMatrix costs =
            build_cost_matrix(src_m, tgt_m, src_desc, tgt_desc, candidates, seed.empty() ? nullptr : &seed);
        auto fixed_indices = [&] {
            std::vector<int> fixed;
            for (const auto& [a, b] : settled) fixed.push_back(costs.index_of(a, b));
            return fixed;
        };
        const double sigma = params.sigma ? *params.sigma : params.sigma_scale * median_positive_cost(costs);
        LevelSolve solved = solve_level(costs, sigma, fixed_indices(), spectral);

        // Grow the candidate set along the complexes: neighbours (sharing a facet) of
        // matched simplices become candidates for each other, then re-solve.
        if (params.expansion_rounds > 0) {
            const auto src_nbrs = facet_neighbors(src_m);
            const auto tgt_nbrs = facet_neighbors(tgt_m);
            for (int round = 0; round < params.expansion_rounds; ++round) {
                const std::size_t before = candidates.size();
                std::sort(candidates.begin(), candidates.end());
                for (const auto& m : solved.assignment.pairs)
                    for (int l : src_nbrs[m.src])
                        for (int lp : tgt_nbrs[m.tgt])
                            if (!skip_src.contains(l) && !skip_tgt.contains(lp) && src_desc.upper[l].valid() &&
                                tgt_desc.upper[lp].valid() && !std::binary_search(candidates.begin(), candidates.begin() + before, CandidatePair{l, lp}))
                                candidates.push_back({l, lp});
                if (candidates.size() == before) break;
                costs = build_cost_matrix(src_m, tgt_m, src_desc, tgt_desc, candidates, seed.empty() ? nullptr : &seed);
                solved = solve_level(costs, sigma, fixed_indices(), spectral);
            }
        }
        diag.candidates = static_cast<int>(costs.pairs.size());
        diag.sigma = solved.sigma;
        diag.converged = solved.spectral.converged;
        diag.iterations = solved.spectral.iterations;
        diag.matched = static_cast<int>(solved.assignment.pairs.size());

        result.objective_total += solved.assignment.objective;
        if (p > 1)
            support = count_face_support(solved.assignment, src_m, tgt_m);
        else
            result.vertex_map = vertex_assignment(solved.assignment, src, tgt, src_desc.lower, tgt_desc.lower);
        result.per_level[p] = std::move(solved.assignment);
        if (params.keep_cost_matrices) result.cost_matrices.emplace(p, std::move(costs));

        diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        result.diagnostics.push_back(diag);
    }
    return result;
}

nlohmann::json result_to_json(const MatchingResult& result, const SkeletonComplex& src, const SkeletonComplex& tgt) {
    nlohmann::json j;
    j["params"] = to_json(result.params);
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& [p, assignment] : result.per_level) {
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& m : assignment.pairs)
            pairs.push_back({src.ids(src.simplices[p][m.src]), tgt.ids(tgt.simplices[p][m.tgt]), m.cost});
        levels.push_back({{"p", p}, {"pairs", std::move(pairs)}, {"objective", assignment.objective}});
    }
    j["per_level"] = std::move(levels);
    nlohmann::json vm = nlohmann::json::array();
    for (const auto& [a, b] : result.vertex_map) vm.push_back({a, b});
    j["vertex_map"] = std::move(vm);
    j["objective_total"] = result.objective_total;
    nlohmann::json diags = nlohmann::json::array();
    for (const auto& d : result.diagnostics)
        diags.push_back({{"p", d.p},
                         {"skipped", d.skipped},
                         {"src_simplices", d.src_simplices},
                         {"tgt_simplices", d.tgt_simplices},
                         {"candidates", d.candidates},
                         {"eliminated", d.eliminated},
                         {"matched", d.matched},
                         {"sigma", d.sigma},
                         {"lambda", d.lambda},
                         {"converged", d.converged},
                         {"iterations", d.iterations}});
    j["diagnostics"] = std::move(diags);
    return j;
}

ResultFile result_from_json(const nlohmann::json& j) {
    ResultFile out;
    try {
        if (j.contains("params")) out.params = match_params_from_json(j.at("params"));
        for (const auto& level : j.value("per_level", nlohmann::json::array())) {
            auto& list = out.per_level[level.at("p").get<int>()];
            for (const auto& pr : level.at("pairs"))
                list.push_back({pr.at(0).get<std::vector<int>>(), pr.at(1).get<std::vector<int>>(), pr.at(2).get<double>()});
        }
        for (const auto& pr : j.at("vertex_map")) out.vertex_map.emplace_back(pr.at(0).get<int>(), pr.at(1).get<int>());
        out.objective_total = j.value("objective_total", 0.0);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("result file: ") + e.what());
    }
    return out;
}

}  // namespace smatch
