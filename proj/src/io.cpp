#include "vortex/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vortex/solver.hpp"

namespace vortex::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    std::filesystem::path p = csv;
    p.replace_extension(".json");
    return p;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    if (!line.empty() && line.back() == sep) parts.emplace_back();
    return parts;
}

double parse_number(const std::string& s, std::size_t line_no) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size())
        throw std::runtime_error("malformed number '" + s + "' on line " + std::to_string(line_no));
    return v;
}

}  // namespace

json kappa_json(const Kappa& k) {
    if (k.is_infinite()) return "inf";
    return k.value();
}

void write_profile_csv(const std::filesystem::path& path, const Profile& p) {
    auto out = open_out(path);
    out << "r,f,S,m\n";
    const auto r = p.grid->r();
    for (std::size_t i = 0; i < p.size(); ++i) {
        out << format_double(r[i]) << ',' << format_double(p.f[i]) << ',' << format_double(p.S[i]) << ','
            << format_double(p.m[i]) << '\n';
    }
}

void write_profile(const std::filesystem::path& csv, const ModelParams& params, const Profile& p, const json& config,
                   std::uint64_t rng_seed) {
    write_profile_csv(csv, p);
    json meta;
    meta["kappa"] = kappa_json(params.kappa);
    meta["d"] = params.d;
    meta["g"] = params.g;
    meta["r_max"] = p.grid->r_max();
    meta["n"] = p.size();
    meta["grading"] = p.grid->grading().to_string();
    meta["energy_total"] = referenced_energy(params, p).total;
    meta["pohozaev_rel_err"] = pohozaev_residual(params, p).rel_err;
    meta["m0"] = p.m0();
    meta["config"] = config;
    meta["rng_seed"] = rng_seed;
    write_json(sidecar_path(csv), meta);
}

Profile read_profile_csv(const std::filesystem::path& path, Grading grading) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty profile file " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "r,f,S,m") throw std::runtime_error("unexpected profile header: " + line);
    std::vector<double> r, f, S, m;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto parts = split(line, ',');
        if (parts.size() != 4) throw std::runtime_error("expected 4 columns on line " + std::to_string(line_no));
        r.push_back(parse_number(parts[0], line_no));
        f.push_back(parse_number(parts[1], line_no));
        S.push_back(parse_number(parts[2], line_no));
        m.push_back(parse_number(parts[3], line_no));
    }
    Profile p;
    try {
        p.grid = std::make_shared<const RadialGrid>(RadialGrid::from_nodes(std::move(r), grading));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("bad radial nodes: ") + e.what());
    }
    p.f = std::move(f);
    p.S = std::move(S);
    p.m = std::move(m);
    return p;
}

LoadedProfile read_profile(const std::filesystem::path& csv) {
    LoadedProfile lp;
    const auto side = sidecar_path(csv);
    std::ifstream in(side);
    if (!in) throw std::runtime_error("missing sidecar " + side.string());
    try {
        lp.metadata = json::parse(in);
        const auto& k = lp.metadata.at("kappa");
        lp.params.kappa = k.is_string() ? Kappa::parse(k.get<std::string>()) : Kappa::finite(k.get<double>());
        lp.params.d = lp.metadata.at("d").get<int>();
        lp.params.g = lp.metadata.at("g").get<double>();
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed sidecar " + side.string() + ": " + e.what());
    }
    Grading grading = Grading::uniform();
    try {
        lp.params.validate();
        if (lp.metadata.contains("grading")) grading = Grading::parse(lp.metadata["grading"].get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("malformed sidecar " + side.string() + ": " + e.what());
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed sidecar " + side.string() + ": " + e.what());
    }
    lp.profile = read_profile_csv(csv, grading);
    return lp;
}

void write_branch_csv(const std::filesystem::path& path, const Branch& branch) {
    auto out = open_out(path);
    out << "g,m0,energy,lambda_min,pohozaev_rel,newton_iters\n";
    for (const auto& p : branch.points) {
        out << format_double(p.g) << ',' << format_double(p.m0) << ',' << format_double(p.energy) << ','
            << format_double(p.lambda_min) << ',' << format_double(p.pohozaev_rel) << ',' << p.newton_iters << '\n';
    }
}

void write_branch(const std::filesystem::path& csv, const Branch& branch, const json& config, std::uint64_t rng_seed) {
    write_branch_csv(csv, branch);
    json meta;
    meta["kappa"] = kappa_json(branch.kappa);
    meta["d"] = branch.d;
    meta["g_star"] = branch.g_star;
    meta["points"] = branch.points.size();
    meta["complete"] = branch.complete;
    meta["abort_reason"] = branch.abort_reason;
    try {
        const auto fit = transition_order(branch);
        meta["transition"] = {{"exponent", fit.exponent}, {"r2", fit.r2}, {"points", fit.points},
                              {"log_prefactor", fit.log_prefactor}};
    } catch (const InsufficientPoints& e) {
        meta["transition"] = nullptr;
        meta["transition_error"] = e.what();
    }
    meta["config"] = config;
    meta["rng_seed"] = rng_seed;
    write_json(sidecar_path(csv), meta);
}

json to_json(const DiagnosticsReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"threshold", c.threshold}});
    return {{"overall", rep.overall}, {"checks", checks}};
}

}  // namespace vortex::io
