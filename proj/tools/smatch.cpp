// Command-line front end: synth, match, eval, perturb, sweep, render.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "smatch/evaluate.hpp"
#include "smatch/perturb.hpp"
#include "smatch/render.hpp"
#include "smatch/sweep.hpp"
#include "smatch/synth.hpp"

using namespace smatch;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// "sphere:1", "cylinder:1,2", "cone:1,2", "ellipsoid:1,2,3", "plane", or inline JSON.
Manifold parse_manifold(const std::string& text) {
    if (!text.empty() && text.front() == '{') {
        try {
            return manifold_from_json(nlohmann::json::parse(text));
        } catch (const nlohmann::json::exception& e) {
            throw UsageError(std::string("--manifold: ") + e.what());
        }
    }
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    std::vector<double> v;
    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ','))
            try {
                v.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw UsageError("--manifold: bad number '" + item + "'");
            }
    }
    auto need = [&](std::size_t count) {
        if (v.size() != count) throw UsageError("--manifold " + kind + " takes " + std::to_string(count) + " values");
    };
    try {
        switch (manifold_kind_from_string(kind)) {
            case ManifoldKind::Sphere: need(1); return Manifold::sphere(v[0]);
            case ManifoldKind::Cylinder: need(2); return Manifold::cylinder(v[0], v[1]);
            case ManifoldKind::Cone: need(2); return Manifold::cone(v[0], v[1]);
            case ManifoldKind::Ellipsoid: need(3); return Manifold::ellipsoid(v[0], v[1], v[2]);
            case ManifoldKind::Plane: need(0); return Manifold::plane();
        }
    } catch (const InvalidArgument& e) {
        throw UsageError(std::string("--manifold: ") + e.what());
    }
    throw UsageError("--manifold: unknown kind " + kind);
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geodesic simplicial-complex landmark matching"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Sample landmarks on a manifold");
    std::string manifold_text = "sphere:1";
    int n = 50;
    double min_sep = 0.0;
    std::uint64_t seed = 0;
    std::string out_path;
    synth->add_option("--manifold", manifold_text, "sphere:R | cylinder:R,H | cone:R,H | ellipsoid:a,b,c | plane | JSON");
    synth->add_option("--n", n)->check(CLI::PositiveNumber);
    synth->add_option("--min-sep", min_sep)->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", seed);
    synth->add_option("--out", out_path);

    // match
    auto* match = app.add_subcommand("match", "Match two landmark sets");
    std::string src_path, tgt_path, sigma_text = "median";
    MatchParams params;
    match->add_option("--src", src_path)->required();
    match->add_option("--tgt", tgt_path)->required();
    match->add_option("--k", params.k);
    match->add_option("--h-max", params.h_max);
    match->add_option("--sigma", sigma_text, "bandwidth or 'median'");
    match->add_option("--elim-quantile", params.elim_quantile);
    match->add_option("--unmatched-threshold", params.unmatched_threshold);
    match->add_option("--sigma-scale", params.sigma_scale, "multiplier on the median when --sigma is 'median'");
    match->add_option("--candidates", params.candidates_per_simplex, "candidates per simplex (0 = all pairs)");
    match->add_option("--coupling", params.coupling, "induced face cost strength");
    match->add_option("--seed-floor", params.seed_floor, "lower bound on an induced cost");
    match->add_option("--refine-passes", params.refine_passes);
    match->add_option("--expansion-rounds", params.expansion_rounds);
    match->add_flag("--restrict-to-support", params.restrict_to_support,
                    "faces with matched cofaces pair only within their partners' facets");
    match->add_option("--seed", params.seed);
    match->add_option("--out", out_path);

    // eval
    auto* eval = app.add_subcommand("eval", "Error of a result against ground truth");
    std::string result_path, gt_path;
    eval->add_option("--result", result_path)->required();
    eval->add_option("--gt", gt_path)->required();

    // perturb
    auto* perturb = app.add_subcommand("perturb", "Perturb a landmark set");
    std::string in_path, kind_text, gt_out;
    PerturbationSpec spec;
    std::vector<double> axis_v, scale_v;
    std::vector<int> shear_axes;
    perturb->add_option("--in", in_path)->required();
    perturb->add_option("--kind", kind_text, "rotate|reflect|scale|shear|noise1|noise2|mcar")->required();
    perturb->add_option("--angle", spec.angle_deg, "degrees");
    perturb->add_option("--axis", axis_v, "rotation axis (3 values) or reflected coordinate (1 value)");
    perturb->add_option("--scale", scale_v, "sx sy sz");
    perturb->add_option("--factor", spec.shear, "shear factor");
    perturb->add_option("--shear-axes", shear_axes, "i j: x_i += factor * x_j");
    perturb->add_option("--p", spec.p);
    perturb->add_option("--q", spec.q);
    perturb->add_option("--fraction", spec.fraction);
    perturb->add_flag("--exact", spec.exact_count, "MCAR removes exactly round(fraction * n) points");
    perturb->add_option("--k", spec.k, "k-NN size of the graph the noise models perturb");
    perturb->add_option("--seed", spec.seed);
    perturb->add_option("--out", out_path);
    perturb->add_option("--gt-out", gt_out, "write the induced ground truth here");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep, CSV to stdout or --out");
    std::string config_path;
    sweep->add_option("--config", config_path)->required();
    sweep->add_option("--out", out_path);

    // render
    auto* render = app.add_subcommand("render", "SVG of a vertex matching");
    render->add_option("--result", result_path)->required();
    render->add_option("--src", src_path)->required();
    render->add_option("--tgt", tgt_path)->required();
    render->add_option("--gt", gt_path);
    render->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) {
            const LandmarkSet set = synth_landmarks(parse_manifold(manifold_text), n, min_sep, seed);
            emit(out_path, landmarks_to_json(set).dump(2) + "\n");
        } else if (match->parsed()) {
            if (sigma_text != "median") {
                try {
                    params.sigma = std::stod(sigma_text);
                } catch (const std::exception&) {
                    throw UsageError("--sigma: expected a number or 'median'");
                }
            }
            try {
                params.validate();
            } catch (const InvalidArgument& e) {
                throw UsageError(e.what());
            }
            const LandmarkSet src = load_landmarks(src_path);
            const LandmarkSet tgt = load_landmarks(tgt_path);
            const SkeletonComplex a = build_complex(landmark_graph(src, params.k), params.h_max);
            const SkeletonComplex b = build_complex(landmark_graph(tgt, params.k), params.h_max);
            const MatchingResult result = match_complexes(a, b, params);
            emit(out_path, result_to_json(result, a, b).dump(2) + "\n");
        } else if (eval->parsed()) {
            const ResultFile result = result_from_json(read_json_file(result_path));
            const MatchingError e = matching_error(result.vertex_map, load_ground_truth(gt_path));
            std::cout << nlohmann::json{{"error_percent", e.percent}, {"correct", e.correct}, {"total", e.total}}.dump()
                      << "\n";
        } else if (perturb->parsed()) {
            try {
                spec.kind = perturbation_kind_from_string(kind_text);
                if (axis_v.size() == 1)
                    spec.reflect_axis = static_cast<int>(axis_v[0]);
                else if (axis_v.size() == 3)
                    spec.axis = Vec3(axis_v[0], axis_v[1], axis_v[2]);
                else if (!axis_v.empty())
                    throw UsageError("--axis takes 1 or 3 values");
                if (!scale_v.empty()) {
                    if (scale_v.size() == 1) scale_v.assign(3, scale_v[0]);
                    if (scale_v.size() != 3) throw UsageError("--scale takes 1 or 3 values");
                    spec.scale = Vec3(scale_v[0], scale_v[1], scale_v[2]);
                }
                if (!shear_axes.empty()) {
                    if (shear_axes.size() != 2) throw UsageError("--shear-axes takes 2 values");
                    spec.shear_axes = {shear_axes[0], shear_axes[1]};
                }
                spec.validate();
            } catch (const InvalidArgument& e) {
                throw UsageError(e.what());
            }
            const Perturbed result = apply_perturbation(load_landmarks(in_path), spec);
            emit(out_path, landmarks_to_json(result.set).dump(2) + "\n");
            if (!gt_out.empty()) save_ground_truth(gt_out, result.ground_truth);
        } else if (sweep->parsed()) {
            emit(out_path, run_sweep(read_json_file(config_path)));
        } else if (render->parsed()) {
            const ResultFile result = result_from_json(read_json_file(result_path));
            std::optional<GroundTruth> gt;
            if (!gt_path.empty()) gt = load_ground_truth(gt_path);
            emit(out_path, render_svg(result.vertex_map, load_landmarks(src_path), load_landmarks(tgt_path), gt));
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const OffManifold& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
