#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "vortex/continuation.hpp"
#include "vortex/diagnostics.hpp"
#include "vortex/model.hpp"

namespace vortex::io {

using nlohmann::json;

/// "p.csv" -> "p.json".
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

/// Header r,f,S,m; 17 significant digits.
void write_profile_csv(const std::filesystem::path& path, const Profile& p);

/// Profile plus sidecar {kappa, d, g, r_max, n, grading, energy_total,
/// pohozaev_rel_err, config, rng_seed}. energy_total is the referenced energy
/// in the limit system.
void write_profile(const std::filesystem::path& csv, const ModelParams& params, const Profile& p,
                   const json& config, std::uint64_t rng_seed);

struct LoadedProfile {
    ModelParams params;
    Profile profile;
    json metadata;
};

/// Reads a profile CSV (and its sidecar for the parameters). Throws
/// std::runtime_error on malformed input.
Profile read_profile_csv(const std::filesystem::path& path, Grading grading = Grading::uniform());
LoadedProfile read_profile(const std::filesystem::path& csv);

/// Header g,m0,energy,lambda_min,pohozaev_rel,newton_iters.
void write_branch_csv(const std::filesystem::path& path, const Branch& branch);
/// CSV plus sidecar {kappa, d, g_star, points, complete, abort_reason,
/// transition (or null) , config, rng_seed}.
void write_branch(const std::filesystem::path& csv, const Branch& branch, const json& config, std::uint64_t rng_seed);

json to_json(const DiagnosticsReport& rep);
json kappa_json(const Kappa& k);

/// Shortest round-trip decimal form used by all writers.
std::string format_double(double v);

}  // namespace vortex::io
