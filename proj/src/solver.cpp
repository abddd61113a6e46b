#include "vortex/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include "vortex/kernels.hpp"
#include "vortex/spectral.hpp"

namespace vortex {

std::string Seed::to_string() const {
    std::ostringstream os;
    os.precision(12);
    switch (kind) {
        case Kind::normal_core: return "normal_core";
        case Kind::perturbed: os << "perturbed(" << amplitude << ")"; return os.str();
        case Kind::trial: os << "trial(" << rho << ")"; return os.str();
        case Kind::custom: return "custom";
    }
    return "unknown";
}

void SolveOptions::validate() const {
    if (!(tol_residual > 0.0)) throw std::invalid_argument("tol_residual must be positive");
    if (max_newton < 1) throw std::invalid_argument("max_newton must be at least 1");
    if (max_flow_steps < 0) throw std::invalid_argument("max_flow_steps must be non-negative");
    if (flow_dt < 0.0) throw std::invalid_argument("flow_dt must be non-negative");
    if (seed.kind == Seed::Kind::custom && !seed.profile) throw std::invalid_argument("custom seed without profile");
}

GridPtr default_grid(const Kappa& kappa, std::size_t n, double r_max) {
    if (kappa.is_infinite()) return build_grid(n, r_max, Grading::uniform());
    const double s = core_grading_strength(kappa.value());
    return build_grid(n, r_max, s > 0.0 ? Grading::graded(s) : Grading::uniform());
}

double recommended_r_max(const Kappa& kappa, double g_min) {
    if (!(g_min > 0.0)) throw std::invalid_argument("recommended_r_max: g must be positive");
    const double rate = std::sqrt(g_min) * (kappa.is_infinite() ? 1.0 : kappa.value());
    return std::max(40.0, std::ceil(10.0 / rate));
}

namespace {

// Per-DOF metric of the tangent inner product expressed in nodal values:
// w for f and m, w / r^2 for S. Zero on frozen entries.
std::vector<double> value_metric(const ModelParams& params, const RadialGrid& grid) {
    const std::size_t n = grid.size(), nf = params.field_count();
    const auto w = grid.weights();
    const auto ir2 = grid.inv_r2();
    std::vector<double> M(n * nf);
    for (std::size_t i = 0; i < n; ++i) {
        M[i * nf] = w[i];
        if (nf == 3) M[i * nf + 1] = w[i] * ir2[i];
        M[i * nf + nf - 1] = w[i];
    }
    return M;
}

std::vector<std::size_t> frozen_dofs(const ModelParams& params, std::size_t n, bool pin_m) {
    auto c = clamped_dofs(params, n);
    if (pin_m) {
        const std::size_t nf = params.field_count();
        for (std::size_t i = 0; i < n; ++i) c.push_back(i * nf + nf - 1);
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
    }
    return c;
}

void apply_clamps(const ModelParams& params, Profile& p, bool pin_m) {
    const std::size_t n = p.size();
    p.f[0] = 0.0;
    p.f[n - 1] = 1.0;
    p.m[n - 1] = 0.0;
    if (params.has_magnetic_field()) {
        p.S[0] = 0.0;
        p.S[n - 1] = params.d;
    } else {
        std::fill(p.S.begin(), p.S.end(), 0.0);
    }
    if (pin_m) std::fill(p.m.begin(), p.m.end(), 0.0);
}

double spectral_bound(const ModelParams& params, const Profile& p, const std::vector<std::size_t>& frozen) {
    const SymBandMatrix H = energy_hessian(params, p);
    const auto M = value_metric(params, *p.grid);
    std::vector<char> is_frozen(H.size(), 0);
    for (std::size_t k : frozen) is_frozen[k] = 1;
    const std::size_t N = H.size(), kd = H.bandwidth();
    double bound = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (is_frozen[i]) continue;
        double s = 0.0;
        const std::size_t lo = i >= kd ? i - kd : 0, hi = std::min(N - 1, i + kd);
        for (std::size_t j = lo; j <= hi; ++j) {
            if (is_frozen[j]) continue;
            s += std::abs(H.at(i, j)) / std::sqrt(M[i] * M[j]);
        }
        bound = std::max(bound, s);
    }
    return bound;
}

// One explicit step; returns the new energy.
double flow_step(const ModelParams& params, Profile& p, double dt, bool pin_m) {
    const auto& K = kernels::active();
    const RadialGrid& grid = *p.grid;
    const std::size_t n = grid.size();
    const auto G = energy_gradient(params, p);
    const std::size_t nf = params.field_count();
    std::vector<double> gf(n), gs(n), gm(n);
    for (std::size_t i = 0; i < n; ++i) {
        gf[i] = G[i * nf];
        if (nf == 3) gs[i] = G[i * nf + 1];
        gm[i] = G[i * nf + nf - 1];
    }
    const auto w = grid.weights();
    K.flow_update(dt, w, gf, p.f);
    if (!pin_m) K.flow_update(dt, w, gm, p.m);
    if (nf == 3) {
        const auto ir2 = grid.inv_r2();
        std::vector<double> ws(n);
        for (std::size_t i = 0; i < n; ++i) ws[i] = i == 0 ? 1.0 : w[i] * ir2[i];
        K.flow_update(dt, ws, gs, p.S);
    }
    apply_clamps(params, p, pin_m);
    return energy(params, p).total;
}

struct Descent {
    bool converged = false;
    int newton_iters = 0;
    int flow_steps = 0;
    double residual = INFINITY;
    std::vector<double> history;
};

// Capped gradient flow followed by energy-descent Newton with a metric shift
// whenever the Hessian is not positive definite.
Descent descend(const ModelParams& params, Profile& p, const SolveOptions& opts, bool pin_m) {
    Descent out;
    const RadialGrid& grid = *p.grid;
    const std::size_t n = grid.size();
    apply_clamps(params, p, pin_m);
    const auto frozen = frozen_dofs(params, n, pin_m);

    double res = sup_norm(residual(params, p));
    if (res > 1e-2 && opts.max_flow_steps > 0) {
        double dt = opts.flow_dt;
        if (dt == 0.0) dt = default_flow_dt(params, p);
        double E = energy(params, p).total;
        double last_check = res;
        for (int k = 0; k < opts.max_flow_steps; ++k) {
            const double En = flow_step(params, p, dt, pin_m);
            ++out.flow_steps;
            if (!(En <= E + 1e-12 * std::max(1.0, std::abs(E)))) break;  // leave the rest to Newton
            E = En;
            if ((k + 1) % 200 == 0) {
                res = sup_norm(residual(params, p));
                if (res < 1e-2 || res > 0.9 * last_check) break;
                last_check = res;
            }
        }
    }

    const auto metric = value_metric(params, grid);
    std::vector<double> x = pack(params, p);
    double E = energy(params, p).total;
    double last_step = INFINITY;
    double mu_last = 0.0;
    const double k2 = params.kappa.potential_scale();
    Profile trial = p;

    for (int it = 0;; ++it) {
        const TangentDirection R = residual(params, p);
        res = sup_norm(R);
        out.history.push_back(res);
        out.residual = res;
        if (res < opts.tol_residual || (last_step < 1e-12 && res < 1e-7)) {
            out.converged = true;
            return out;
        }
        if (it >= opts.max_newton) return out;

        auto G = energy_gradient(params, p);
        for (std::size_t k : frozen) G[k] = 0.0;
        SymBandMatrix H = energy_hessian(params, p);
        for (std::size_t k : frozen) H.pin(k);

        std::optional<BandCholesky> chol;
        double mu = 0.0;
        for (int attempt = 0; attempt < 40; ++attempt) {
            SymBandMatrix Hs = H;
            if (mu > 0.0) {
                std::vector<double> shift_metric = metric;
                for (std::size_t k : frozen) shift_metric[k] = 0.0;
                Hs.shift_diagonal(mu, shift_metric);
            }
            chol = BandCholesky::factor(Hs);
            if (chol) break;
            mu = (mu == 0.0) ? std::max(1e-4 * std::max(1.0, k2), 0.1 * mu_last) : 10.0 * mu;
        }
        if (!chol) throw NonConvergence("shifted Hessian never became positive definite", p, out.history);
        mu_last = mu;

        std::vector<double> delta(G.size());
        for (std::size_t k = 0; k < G.size(); ++k) delta[k] = -G[k];
        chol->solve_in_place(delta);
        for (std::size_t k : frozen) delta[k] = 0.0;
        double slope = 0.0, dmax = 0.0;
        for (std::size_t k = 0; k < G.size(); ++k) {
            slope += G[k] * delta[k];
            dmax = std::max(dmax, std::abs(delta[k]));
        }

        double alpha = 1.0;
        bool accepted = false;
        std::vector<double> xt(x.size());
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t k = 0; k < x.size(); ++k) xt[k] = x[k] + alpha * delta[k];
            unpack(params, xt, trial);
            const double Et = energy(params, trial).total;
            if (Et <= E + 1e-4 * alpha * slope) {
                accepted = true;
                E = Et;
                break;
            }
            // energy differences drown in rounding near a minimizer; take the
            // full Newton step if it improves the residual
            if (ls == 0 && mu == 0.0 && sup_norm(residual(params, trial)) < res) {
                accepted = true;
                E = Et;
                break;
            }
            alpha *= 0.5;
        }
        ++out.newton_iters;
        if (!accepted) {
            last_step = 0.0;
            if (res < 1e-7) continue;  // at the rounding floor; the check above decides
            throw NonConvergence("line search failed", p, out.history);
        }
        x.swap(xt);
        std::swap(p, trial);
        last_step = alpha * dmax;
    }
}

void finalize_signs(Profile& p) {
    for (double& v : p.f) v = std::abs(v);
    double lo = 0.0, hi = 0.0;
    for (double v : p.m) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (-lo > hi) {
        for (double& v : p.m) v = -v;
    }
}

Profile initial_normal_core(const ModelParams& params, GridPtr grid) {
    Profile p = Profile::zeros(grid);
    const auto r = grid->r();
    const double k = params.has_magnetic_field() ? params.kappa.value() : 1.0;
    const double d = params.d;
    for (std::size_t i = 0; i < r.size(); ++i) {
        p.f[i] = std::pow(1.0 - std::exp(-k * r[i]), std::abs(d));
        if (params.has_magnetic_field()) p.S[i] = d * (1.0 - (1.0 + r[i]) * std::exp(-r[i]));
    }
    return p;
}

using CacheKey = std::tuple<const RadialGrid*, bool, double, int>;

std::mutex cache_mutex;
std::map<CacheKey, std::shared_ptr<const Profile>>& normal_core_cache() {
    static std::map<CacheKey, std::shared_ptr<const Profile>> cache;
    return cache;
}

Solution solve_canonical(const ModelParams& params, GridPtr grid, const SolveOptions& opts);

}  // namespace

double default_flow_dt(const ModelParams& params, const Profile& p) {
    const double k2 = params.kappa.potential_scale();
    const double h = p.grid->min_width();
    const double dt_lap = h * h / (4.0 * std::max(1.0, k2));
    const double bound = spectral_bound(params, p, clamped_dofs(params, p.size()));
    return bound > 0.0 ? std::min(dt_lap, 0.9 / bound) : dt_lap;
}

Profile gradient_flow(const ModelParams& params, const Profile& start, int steps, double dt) {
    params.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("gradient_flow: dt must be positive");
    if (steps < 0) throw std::invalid_argument("gradient_flow: steps must be non-negative");
    Profile p = start;
    apply_clamps(params, p, false);
    double E = energy(params, p).total;
    for (int k = 0; k < steps; ++k) {
        const double En = flow_step(params, p, dt, false);
        if (En > E + 1e-12 * std::max(1.0, std::abs(E))) {
            std::ostringstream os;
            os << "energy rose from " << E << " to " << En << " at step " << k << " (dt = " << dt << ")";
            throw StabilityViolation(os.str());
        }
        E = En;
    }
    return p;
}

Solution solve_normal_core(const ModelParams& params, GridPtr grid, const SolveOptions& opts) {
    params.validate();
    opts.validate();
    if (params.d < 0) {
        ModelParams q = params;
        q.d = -params.d;
        Solution s = solve_normal_core(q, grid, opts);
        for (double& v : s.profile.S) v = -v;
        return s;
    }
    Profile p = opts.seed.kind == Seed::Kind::custom ? *opts.seed.profile : initial_normal_core(params, grid);
    if (p.grid != grid && p.grid->size() != grid->size()) throw std::invalid_argument("seed profile grid mismatch");
    p.grid = grid;
    Descent dsc = descend(params, p, opts, true);
    if (!dsc.converged) throw NonConvergence("normal-core Newton budget exhausted", p, dsc.history);
    finalize_signs(p);
    Solution s{std::move(p), {}};
    s.stats.newton_iters = dsc.newton_iters;
    s.stats.flow_steps = dsc.flow_steps;
    s.stats.residual = dsc.residual;
    s.stats.residual_history = std::move(dsc.history);
    s.stats.seed = "normal_core";
    return s;
}

std::shared_ptr<const Profile> cached_normal_core(const Kappa& kappa, int d, GridPtr grid) {
    const int ad = std::abs(d);
    const CacheKey key{grid.get(), kappa.is_infinite(), kappa.is_infinite() ? 0.0 : kappa.value(), ad};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto& cache = normal_core_cache();
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    ModelParams params{kappa, ad, 1.0};
    auto result = std::make_shared<const Profile>(solve_normal_core(params, grid).profile);
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& cache = normal_core_cache();
    auto [it, inserted] = cache.emplace(key, result);
    return it->second;
}

EnergyBreakdown referenced_energy(const ModelParams& params, const Profile& p) {
    if (params.has_magnetic_field()) return energy(params, p);
    const auto ref = cached_normal_core(params.kappa, params.d, p.grid);
    return energy(params, p, ref->f);
}

namespace {

Profile normal_core_for(const ModelParams& params, GridPtr grid) {
    Profile p = *cached_normal_core(params.kappa, params.d, grid);
    return p;
}

Solution solve_canonical(const ModelParams& params, GridPtr grid, const SolveOptions& opts) {
    Solution s;
    s.stats.seed = opts.seed.to_string();
    if (opts.seed.kind == Seed::Kind::normal_core) {
        // the normal core is a critical point for every g
        s.profile = normal_core_for(params, grid);
        s.stats.residual = sup_norm(residual(params, s.profile));
        s.stats.residual_history = {s.stats.residual};
        return s;
    }

    Profile start;
    switch (opts.seed.kind) {
        case Seed::Kind::perturbed: {
            start = normal_core_for(params, grid);
            const Threshold th = threshold_g(params.kappa, params.d, grid);
            double peak = 0.0;
            for (double v : th.ground.vec) peak = std::max(peak, v);
            for (std::size_t i = 0; i < start.size(); ++i) start.m[i] = opts.seed.amplitude * th.ground.vec[i] / peak;
            break;
        }
        case Seed::Kind::trial: start = trial_profile(params, grid, opts.seed.rho); break;
        case Seed::Kind::custom:
            start = *opts.seed.profile;
            if (start.size() != grid->size()) throw std::invalid_argument("seed profile grid mismatch");
            start.grid = grid;
            if (params.has_magnetic_field() == false) std::fill(start.S.begin(), start.S.end(), 0.0);
            break;
        case Seed::Kind::normal_core: break;
    }

    Descent dsc = descend(params, start, opts, false);
    s.stats.newton_iters = dsc.newton_iters;
    s.stats.flow_steps = dsc.flow_steps;
    s.stats.residual = dsc.residual;
    s.stats.residual_history = dsc.history;
    if (!dsc.converged) throw NonConvergence("Newton budget exhausted", start, dsc.history);
    finalize_signs(start);

    const Profile normal = normal_core_for(params, grid);
    s.stats.seeded_energy = energy(params, start).total;
    s.stats.normal_core_energy = energy(params, normal).total;
    const double slack = 1e-12 * std::max(1.0, std::abs(s.stats.normal_core_energy));
    if (s.stats.normal_core_energy < s.stats.seeded_energy - slack) {
        s.stats.chose_normal_core = true;
        s.profile = normal;
        s.stats.residual = sup_norm(residual(params, normal));
    } else {
        s.profile = std::move(start);
    }
    return s;
}

}  // namespace

Solution solve(const ModelParams& params, GridPtr grid, const SolveOptions& opts) {
    params.validate();
    opts.validate();
    if (!grid) throw std::invalid_argument("solve: null grid");
    if (params.d < 0) {
        ModelParams q = params;
        q.d = -params.d;
        SolveOptions o = opts;
        if (o.seed.kind == Seed::Kind::custom) {
            Profile seed = *o.seed.profile;
            for (double& v : seed.S) v = -v;
            o.seed = Seed::custom(std::move(seed));
        }
        Solution s = solve_canonical(q, grid, o);
        for (double& v : s.profile.S) v = -v;
        return s;
    }
    return solve_canonical(params, grid, opts);
}

double trial_step_constant() { return 72.0 * (4.0 * std::numbers::ln2 - 2.75); }

double trial_energy_bound(const ModelParams& params, double rho) {
    const double k2 = params.kappa.potential_scale();
    const double d2 = static_cast<double>(params.d) * params.d;
    const double magnetic = params.has_magnetic_field() ? trial_step_constant() * d2 / (rho * rho) : 0.0;
    return magnetic + std::numbers::pi * std::numbers::pi / (4.0 * std::log(rho)) +
           0.5 * k2 * params.g * std::pow(rho, 4);
}

Profile trial_profile(const ModelParams& params, GridPtr grid, double rho) {
    params.validate();
    if (!(rho >= 2.0)) throw std::invalid_argument("trial_profile: rho must be at least 2");
    if (!(rho * rho <= grid->r_max())) throw std::invalid_argument("trial_profile: rho^2 must not exceed r_max");
    Profile p = Profile::zeros(grid);
    const auto r = grid->r();
    const double lr = std::log(rho);
    const double half_pi = 0.5 * std::numbers::pi;
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double x = r[i];
        double u = 0.0;
        if (x <= rho) u = 1.0;
        else if (x < rho * rho) u = std::log(rho * rho / x) / lr;
        p.f[i] = std::cos(u * half_pi);
        p.m[i] = std::sin(u * half_pi);
        if (params.has_magnetic_field()) {
            double eta = 0.0;
            if (x >= rho) eta = 1.0;
            else if (x > 0.5 * rho) {
                const double t = (x - 0.5 * rho) / (0.5 * rho);
                eta = t * t * (3.0 - 2.0 * t);
            }
            p.S[i] = params.d * eta;
        }
    }
    p.f[0] = 0.0;
    p.m.back() = 0.0;
    p.f.back() = 1.0;
    return p;
}

}  // namespace vortex
