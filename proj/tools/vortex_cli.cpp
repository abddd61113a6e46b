// vortex: solve, continue and validate radial SO(5) vortex profiles.
//
// Exit codes: 0 success, 1 usage, 2 non-convergence, 3 validation failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vortex/continuation.hpp"
#include "vortex/diagnostics.hpp"
#include "vortex/errors.hpp"
#include "vortex/io.hpp"
#include "vortex/solver.hpp"
#include "vortex/spectral.hpp"

using nlohmann::json;
using namespace vortex;

namespace {

constexpr int kOk = 0, kUsage = 1, kNoConvergence = 2, kInvalid = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Flat key=value config. Keys are flag names without the leading dashes.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file " + path);
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(line_no) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        kv.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return kv;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

// Splices config file entries into argv as flags, skipping keys given on the
// command line, so explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<long>(i), args.begin() + static_cast<long>(i) + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<long>(i));
            break;
        }
    }
    if (path.empty()) return args;
    std::vector<std::string> extra;
    for (const auto& [key, value] : read_config(path)) {
        const std::string flag = "--" + key;
        if (has_flag(args, flag) || has_flag(extra, flag)) continue;
        extra.push_back(flag);
        extra.push_back(value);
    }
    args.insert(args.end(), extra.begin(), extra.end());
    return args;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw UsageError(std::string("bad number in ") + what + ": " + item);
        out.push_back(v);
    }
    if (out.empty()) throw UsageError(std::string(what) + " is empty");
    return out;
}

Kappa parse_kappa(const std::string& text) {
    try {
        return Kappa::parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

// Grid flags shared by every verb. n = 0 keeps the node spacing at 0.01
// (at least 4001 nodes); r_max = 0 means the verb's default.
struct GridFlags {
    std::size_t n = 0;
    double r_max = 0.0;
    std::string grading = "auto";

    void add(CLI::App* app) {
        app->add_option("--n", n, "grid nodes (0: keep spacing 0.01)");
        app->add_option("--rmax", r_max, "domain radius (0: automatic)");
        app->add_option("--grading", grading, "auto, uniform or graded(s)");
    }

    GridPtr build(const Kappa& kappa, double default_r_max) {
        if (r_max == 0.0) r_max = default_r_max;
        if (!(r_max > 0.0)) throw UsageError("--rmax must be positive");
        if (n == 0) n = std::max<std::size_t>(4001, static_cast<std::size_t>(std::llround(r_max / 0.01)) + 1);
        try {
            if (grading == "auto") return default_grid(kappa, n, r_max);
            return build_grid(n, r_max, Grading::parse(grading));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }

    void record(json& cfg) const {
        cfg["n"] = n;
        cfg["rmax"] = r_max;
        cfg["grading"] = grading;
    }
};

Seed parse_seed(const std::string& text) {
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    double arg = 0.0;
    if (colon != std::string::npos) arg = parse_list(text.substr(colon + 1), "--seed").front();
    if (kind == "normal") return Seed::normal_core();
    if (kind == "perturbed") return Seed::perturbed(colon == std::string::npos ? 0.1 : arg);
    if (kind == "trial") return Seed::trial(colon == std::string::npos ? 8.0 : arg);
    throw UsageError("unknown --seed '" + text + "' (normal, perturbed[:amp], trial[:rho])");
}

ModelParams make_params(const Kappa& kappa, int d, double g) {
    ModelParams p{kappa, d, g};
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return p;
}

void print_json(const json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

// solve

struct SolveCmd {
    std::string kappa, seed = "perturbed", out;
    int d = 1;
    double g = 0.0, tol = 1e-10;
    int max_newton = 50;
    std::uint64_t rng_seed = 0;
    GridFlags grid;
    int code = 0;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("solve", "solve for a vortex profile");
        c->add_option("--kappa", kappa, "GL parameter or inf")->required();
        c->add_option("--d", d, "winding number")->required();
        c->add_option("--g", g, "anisotropy")->required();
        c->add_option("--seed", seed, "normal, perturbed[:amp] or trial[:rho]");
        c->add_option("--tol", tol, "residual tolerance");
        c->add_option("--max-newton", max_newton, "Newton iteration cap");
        c->add_option("--rng-seed", rng_seed, "recorded in the sidecar");
        c->add_option("--out", out, "profile CSV (sidecar written next to it)");
        grid.add(c);
        c->callback([this] { code = run(); });
    }

    int run() {
        const Kappa k = parse_kappa(kappa);
        const ModelParams params = make_params(k, d, g);
        SolveOptions opts;
        opts.tol_residual = tol;
        opts.max_newton = max_newton;
        opts.seed = parse_seed(seed);
        const GridPtr gp = grid.build(k, 40.0);
        const Solution sol = solve(params, gp, opts);
        const auto e = referenced_energy(params, sol.profile);
        const auto poh = pohozaev_residual(params, sol.profile);
        std::printf("energy=%.12g m0=%.6e pohozaev_rel=%.3e residual=%.3e newton=%d seed=%s\n", e.total,
                    sol.profile.m0(), poh.rel_err, sol.stats.residual, sol.stats.newton_iters,
                    sol.stats.seed.c_str());
        if (!out.empty()) {
            json cfg{{"command", "solve"}, {"kappa", kappa}, {"d", d}, {"g", g}, {"seed", seed},
                     {"tol", tol}, {"max_newton", max_newton}};
            grid.record(cfg);
            io::write_profile(out, params, sol.profile, cfg, rng_seed);
        }
        return kOk;
    }
};

// threshold

struct ThresholdCmd {
    std::string kappa, out;
    int d = 1;
    GridFlags grid;
    int code = 0;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("threshold", "AF instability threshold g* of the normal core");
        c->add_option("--kappa", kappa, "GL parameter or inf")->required();
        c->add_option("--d", d, "winding number")->required();
        c->add_option("--out", out, "write the JSON here instead of stdout");
        grid.add(c);
        c->callback([this] { code = run(); });
    }

    int run() {
        const Kappa k = parse_kappa(kappa);
        make_params(k, d, 1.0);  // g does not enter the threshold
        const GridPtr gp = grid.build(k, 40.0);
        const Threshold t = threshold_g(k, d, gp);
        print_json({{"kappa", io::kappa_json(k)}, {"d", d}, {"g_star", t.g_star}, {"lambda0", t.lambda0},
                    {"r_max", gp->r_max()}, {"n", gp->size()}},
                   out);
        return kOk;
    }
};

// branch

struct BranchCmd {
    std::string kappa, out;
    int d = 1, steps = 40;
    double g_min = 0.0;
    std::uint64_t rng_seed = 0;
    GridFlags grid;
    int code = 0;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("branch", "continue the AF-core branch from g* down to g-min");
        c->add_option("--kappa", kappa, "GL parameter or inf")->required();
        c->add_option("--d", d, "winding number")->required();
        c->add_option("--g-min", g_min, "last g on the branch")->required();
        c->add_option("--steps", steps, "solved points below g*");
        c->add_option("--rng-seed", rng_seed, "recorded in the sidecar");
        c->add_option("--out", out, "branch CSV (sidecar written next to it)")->required();
        grid.add(c);
        c->callback([this] { code = run(); });
    }

    int run() {
        const Kappa k = parse_kappa(kappa);
        make_params(k, d, g_min);
        if (!(g_min > 0.0)) throw UsageError("--g-min must be positive");
        if (steps < 1) throw UsageError("--steps must be at least 1");
        const GridPtr gp = grid.build(k, recommended_r_max(k, g_min));
        const Branch b = trace_branch(k, d, gp, g_min, steps);
        json cfg{{"command", "branch"}, {"kappa", kappa}, {"d", d}, {"g_min", g_min}, {"steps", steps}};
        grid.record(cfg);
        io::write_branch(out, b, cfg, rng_seed);
        std::printf("g_star=%.10g points=%zu complete=%s\n", b.g_star, b.points.size(),
                    b.complete ? "true" : "false");
        if (!b.complete) {
            std::cerr << "branch stopped early: " << b.abort_reason << '\n';
            return kNoConvergence;
        }
        return kOk;
    }
};

// validate

struct ValidateCmd {
    std::string path, report;
    double slack = 1e-8;
    int code = 0;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("validate", "check a profile CSV and its sidecar");
        c->add_option("profile", path, "profile CSV")->required()->check(CLI::ExistingFile);
        c->add_option("--report", report, "write the report JSON here instead of stdout");
        c->add_option("--slack", slack, "tolerance on every inequality");
        c->callback([this] { code = run(); });
    }

    int run() {
        io::LoadedProfile lp;
        try {
            lp = io::read_profile(path);
        } catch (const std::exception& e) {
            std::cerr << "invalid profile: " << e.what() << '\n';
            return kInvalid;
        }
        DiagnosticsReport rep = check_admissible(lp.params, lp.profile, slack);
        rep.below("pohozaev_rel", pohozaev_residual(lp.params, lp.profile).rel_err, 1e-3);
        rep.below("residual", sup_norm(residual(lp.params, lp.profile)), 1e-6);
        if (lp.metadata.contains("energy_total") && lp.metadata["energy_total"].is_number()) {
            const double stored = lp.metadata["energy_total"].get<double>();
            const double e = referenced_energy(lp.params, lp.profile).total;
            rep.below("energy_matches_sidecar", std::abs(e - stored) / std::max(1.0, std::abs(stored)), 1e-12);
        }
        json j = io::to_json(rep);
        j["profile"] = path;
        print_json(j, report);
        return rep.overall ? kOk : kInvalid;
    }
};

// limit

struct LimitCmd {
    std::string kappas = "5,10,20", out;
    int d = 1;
    double g = 0.1, window = 5.0;
    GridFlags grid;
    int code = 0;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("limit", "compare rescaled finite-kappa solutions with the limit system");
        c->add_option("--kappas", kappas, "comma-separated increasing kappas");
        c->add_option("--d", d, "winding number");
        c->add_option("--g", g, "anisotropy");
        c->add_option("--window", window, "rescaled radius for the sup norms");
        c->add_option("--out", out, "write the JSON here instead of stdout");
        grid.add(c);
        c->callback([this] { code = run(); });
    }

    int run() {
        const auto ks = parse_list(kappas, "--kappas");
        for (double k : ks) make_params(Kappa::finite(k), d, g);
        make_params(Kappa::infinite(), d, g);
        const GridPtr inf_grid = grid.build(Kappa::infinite(), 40.0);
        LimitOptions lo;
        lo.n = grid.n;
        lo.r_max = grid.r_max;
        lo.window = window;
        const LimitTable t = limit_check(ks, d, g, inf_grid, lo);
        json rows = json::array();
        for (const auto& r : t.rows)
            rows.push_back({{"kappa", r.kappa}, {"sup_f", r.sup_f}, {"sup_m", r.sup_m},
                            {"sup_S_over_r", r.sup_S_over_r}, {"g_star", r.g_star},
                            {"g_star_gap", r.g_star_gap}, {"m0", r.m0}});
        print_json({{"g", t.g},
                    {"d", d},
                    {"g_star_inf", t.g_star_inf},
                    {"window", t.window},
                    {"rows", rows},
                    {"monotone",
                     {{"sup_f", t.f_decreasing},
                      {"sup_m", t.m_decreasing},
                      {"sup_S_over_r", t.S_decreasing},
                      {"g_star_gap", t.g_star_decreasing}}},
                    {"all_monotone", t.all_monotone()}},
                   out);
        return t.all_monotone() ? kOk : kInvalid;
    }
};

// scan-g

struct ScanCmd {
    std::string kappa = "1", g_list = "0.1,0.01,0.001", out;
    int d = 1;
    GridFlags grid;
    int code = 0;

    void add(CLI::App& app) {
        auto* c = app.add_subcommand("scan-g", "minimizers along a decreasing list of g");
        c->add_option("--kappa", kappa, "GL parameter (finite)");
        c->add_option("--d", d, "winding number");
        c->add_option("--g-list", g_list, "comma-separated decreasing g values");
        c->add_option("--out", out, "write the JSON here instead of stdout");
        grid.add(c);
        c->callback([this] { code = run(); });
    }

    int run() {
        const Kappa k = parse_kappa(kappa);
        if (k.is_infinite()) throw UsageError("scan-g needs a finite --kappa");
        const auto gs = parse_list(g_list, "--g-list");
        for (double g : gs) make_params(k, d, g);
        if (!strictly_decreasing(gs, 0.0)) throw UsageError("--g-list must be strictly decreasing");
        const GridPtr gp = grid.build(k, recommended_r_max(k, gs.back()));
        const ScanTable t = g_to_zero_scan(k, d, gp, gs);
        json rows = json::array();
        for (const auto& r : t.rows)
            rows.push_back({{"g", r.g}, {"energy", r.energy}, {"m0", r.m0}, {"max_f_core", r.max_f_core}});
        print_json({{"kappa", io::kappa_json(k)},
                    {"d", d},
                    {"r_max", gp->r_max()},
                    {"n", gp->size()},
                    {"rows", rows},
                    {"energy_decreasing", t.energy_decreasing},
                    {"m0_increasing", t.m0_increasing},
                    {"f_core_decreasing", t.f_core_decreasing}},
                   out);
        return t.energy_decreasing ? kOk : kInvalid;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial SO(5) Ginzburg-Landau vortex solver"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    SolveCmd solve_cmd;
    ThresholdCmd threshold_cmd;
    BranchCmd branch_cmd;
    ValidateCmd validate_cmd;
    LimitCmd limit_cmd;
    ScanCmd scan_cmd;
    solve_cmd.add(app);
    threshold_cmd.add(app);
    branch_cmd.add(app);
    validate_cmd.add(app);
    limit_cmd.add(app);
    scan_cmd.add(app);

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = expand_config(std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help();
        return kUsage;
    } catch (const NonConvergence& e) {
        std::cerr << "no convergence: " << e.what() << '\n';
        return kNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    }
    // Exactly one subcommand ran; the others left their code at 0.
    return std::max({solve_cmd.code, threshold_cmd.code, branch_cmd.code, validate_cmd.code, limit_cmd.code,
                     scan_cmd.code});
}
