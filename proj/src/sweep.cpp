#include "smatch/sweep.hpp"

#include <iomanip>
#include <sstream>

#include "smatch/evaluate.hpp"
#include "smatch/perturb.hpp"
#include "smatch/synth.hpp"

namespace smatch {

namespace {

template <class T>
std::vector<T> axis(const nlohmann::json& grid, const char* key, T fallback) {
    if (!grid.contains(key)) return {fallback};
    auto v = grid.at(key).get<std::vector<T>>();
    if (v.empty()) throw ParseError(std::string("grid.") + key + ": empty list");
    return v;
}

PerturbationSpec perturbation_from_json(const nlohmann::json& j, std::uint64_t seed) {
    PerturbationSpec s;
    s.kind = perturbation_kind_from_string(j.at("kind").get<std::string>());
    s.angle_deg = j.value("angle", 0.0);
    if (j.contains("axis")) {
        if (j.at("axis").is_number())
            s.reflect_axis = j.at("axis").get<int>();
        else {
            const auto a = j.at("axis").get<std::vector<double>>();
            if (a.size() != 3) throw ParseError("perturbation.axis: expected 3 components");
            s.axis = Vec3(a[0], a[1], a[2]);
        }
    }
    if (j.contains("scale")) {
        const auto a = j.at("scale").get<std::vector<double>>();
        if (a.size() != 3) throw ParseError("perturbation.scale: expected 3 components");
        s.scale = Vec3(a[0], a[1], a[2]);
    }
    s.shear = j.value("factor", 0.0);
    s.p = j.value("p", 0.0);
    s.q = j.value("q", 0.0);
    s.fraction = j.value("fraction", 0.0);
    s.exact_count = j.value("exact", false);
    s.seed = j.value("seed", seed);
    return s;
}

}  // namespace

std::string run_sweep(const nlohmann::json& config) {
    std::ostringstream csv;
    csv << "index,seed,n,radius,k,n_src,n_tgt,matched,correct,total,error_percent,objective_total\n";
    try {
        const Manifold base = manifold_from_json(config.at("manifold"));
        const double min_sep = config.value("min_sep", 0.0);
        MatchParams params = config.contains("params") ? match_params_from_json(config.at("params")) : MatchParams{};
        const nlohmann::json grid = config.value("grid", nlohmann::json::object());
        const auto seeds = axis<std::uint64_t>(grid, "seed", config.value("seed", std::uint64_t{0}));
        const auto sizes = axis<int>(grid, "n", config.value("n", 50));
        const auto radii = axis<double>(grid, "radius", 1.0);
        const auto ks = axis<int>(grid, "k", params.k);

        int index = 0;
        for (auto seed : seeds)
            for (int n : sizes) {
                const LandmarkSet instance = synth_landmarks(base, n, min_sep, seed);
                for (double r : radii) {
                    const LandmarkSet tgt = scale_instance(instance, r);
                    Perturbed src{tgt, identity_ground_truth(tgt)};
                    if (config.contains("perturbation"))
                        src = apply_perturbation(tgt, perturbation_from_json(config.at("perturbation"), seed));
                    for (int k : ks) {
                        MatchParams cell = params;
                        cell.k = k;
                        cell.seed = seed;
                        const MatchingResult result = match_landmarks(src.set, tgt, cell);
                        const MatchingError err = matching_error(result, src.ground_truth);
                        csv << index++ << ',' << seed << ',' << n << ',' << r << ',' << k << ','
                            << src.set.points.size() << ',' << tgt.points.size() << ','
                            << result.vertex_map.size() << ',' << err.correct << ',' << err.total << ','
                            << std::setprecision(10) << err.percent << ',' << result.objective_total
                            << std::setprecision(6) << '\n';
                    }
                }
            }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("sweep config: ") + e.what());
    }
    return csv.str();
}

}  // namespace smatch
