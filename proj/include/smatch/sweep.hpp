#pragma once

#include <string>

#include <json.hpp>

namespace smatch {

/// Sweep configuration:
///   {"manifold": {...}, "n": 50, "min_sep": 0.1, "seed": 1,
///    "params": {match params}, "perturbation": {"kind": "rotate", ...},
///    "grid": {"k": [4,5,6,7], "radius": [1,2], "n": [...], "seed": [...]}}
/// Every grid key is optional; the table is the Cartesian product in the order
/// seed, n, radius, k. The instance is synthesised on the unscaled manifold and
/// then scaled by `radius`, so radius rows share one normalised instance.
/// Returns CSV with header index,seed,n,radius,k,n_src,n_tgt,matched,correct,total,error_percent,objective_total.
std::string run_sweep(const nlohmann::json& config);

}  // namespace smatch
