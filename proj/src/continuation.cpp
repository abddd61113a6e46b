#include "vortex/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "vortex/diagnostics.hpp"
#include "vortex/errors.hpp"
#include "vortex/spectral.hpp"

namespace vortex {

double sup_distance(const Profile& a, const Profile& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sup_distance: profiles on different grids");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s = std::max({s, std::abs(a.f[i] - b.f[i]), std::abs(a.S[i] - b.S[i]), std::abs(a.m[i] - b.m[i])});
    }
    return s;
}

namespace {

struct Attempt {
    bool ok = false;
    std::string why;
    BranchPoint point;
    Profile profile;
};

Attempt attempt_point(const ModelParams& params, GridPtr grid, const SolveOptions& base, const Seed& seed,
                      const BranchOptions& opts) {
    Attempt a;
    SolveOptions so = base;
    so.seed = seed;
    Solution s;
    try {
        s = solve(params, grid, so);
    } catch (const NonConvergence& e) {
        a.why = std::string("no convergence: ") + e.what();
        return a;
    }
    const Profile& p = s.profile;
    const auto poh = pohozaev_residual(params, p);
    const auto adm = check_admissible(params, p);
    const auto eig = hessian_min_eig(params, p);
    a.point.g = params.g;
    a.point.m0 = p.m0();
    a.point.energy = referenced_energy(params, p).total;
    a.point.lambda_min = eig.lambda;
    a.point.pohozaev_rel = poh.rel_err;
    a.point.newton_iters = s.stats.newton_iters;
    a.profile = p;
    std::ostringstream why;
    if (!(poh.rel_err < opts.pohozaev_gate)) why << "pohozaev " << poh.rel_err << "; ";
    if (!adm.overall) why << "admissibility; ";
    if (!(eig.lambda > opts.lambda_gate)) why << "lambda_min " << eig.lambda << "; ";
    if (!(p.m0() > 1e-8)) why << "lost the AF core (m0 = " << p.m0() << "); ";
    a.why = why.str();
    a.ok = a.why.empty();
    return a;
}

}  // namespace

Branch trace_branch(const Kappa& kappa, int d, GridPtr grid, double g_min, int steps, const BranchOptions& opts) {
    if (!(g_min > 0.0)) throw std::invalid_argument("trace_branch: g_min must be positive");
    if (steps < 1) throw std::invalid_argument("trace_branch: steps must be at least 1");
    Branch br;
    br.kappa = kappa;
    br.d = d;
    const Threshold th = threshold_g(kappa, d, grid);
    br.g_star = th.g_star;
    if (!(g_min < br.g_star * (1.0 - opts.first_offset)))
        throw std::invalid_argument("trace_branch: g_min must lie below the first branch point");

    // anchor: the normal core at the bifurcation point
    {
        const ModelParams params{kappa, d, br.g_star};
        const auto core = cached_normal_core(kappa, d, grid);
        BranchPoint bp;
        bp.g = br.g_star;
        bp.m0 = 0.0;
        bp.energy = referenced_energy(params, *core).total;
        bp.lambda_min = hessian_min_eig(params, *core).lambda;
        bp.pohozaev_rel = pohozaev_residual(params, *core).rel_err;
        br.points.push_back(bp);
    }

    const double first = opts.first_offset * br.g_star;
    const double last = br.g_star - g_min;
    std::vector<double> schedule(steps);
    for (int k = 0; k < steps; ++k) {
        const double t = steps == 1 ? 1.0 : static_cast<double>(k) / (steps - 1);
        schedule[k] = br.g_star - first * std::pow(last / first, t);
    }
    schedule.back() = g_min;

    Seed seed = Seed::perturbed(opts.first_amplitude);
    double g_prev = br.g_star;
    for (double g : schedule) {
        ModelParams params{kappa, d, g};
        Attempt a = attempt_point(params, grid, opts.solve, seed, opts);
        if (!a.ok) {
            // one retry through the midpoint of the step
            ModelParams half{kappa, d, 0.5 * (g_prev + g)};
            Attempt h = attempt_point(half, grid, opts.solve, seed, opts);
            if (h.ok) {
                br.points.push_back(h.point);
                seed = Seed::custom(h.profile);
                a = attempt_point(params, grid, opts.solve, seed, opts);
            }
            if (!a.ok) {
                br.complete = false;
                std::ostringstream os;
                os << "point g = " << g << " failed: " << a.why;
                br.abort_reason = os.str();
                return br;
            }
        }
        br.points.push_back(a.point);
        seed = Seed::custom(std::move(a.profile));
        g_prev = g;
    }
    return br;
}

TransitionFit transition_order(const Branch& branch) {
    std::vector<double> x, y;
    for (const auto& p : branch.points) {
        if (p.g < branch.g_star && p.g >= 0.8 * branch.g_star && p.m0 > 0.0) {
            x.push_back(std::log(branch.g_star - p.g));
            y.push_back(std::log(p.m0));
        }
    }
    if (x.size() < 10) {
        std::ostringstream os;
        os << "transition_order needs at least 10 AF points within [0.8 g*, g*), got " << x.size();
        throw InsufficientPoints(os.str());
    }
    const LineFit fit = fit_line(x, y);
    return TransitionFit{fit.slope, fit.intercept, fit.r2, static_cast<int>(x.size())};
}

BifurcationDirection bifurcation_direction(const Kappa& kappa, int d, GridPtr grid) {
    if (kappa.is_infinite()) throw std::invalid_argument("bifurcation_direction needs finite kappa");
    const double k2 = kappa.potential_scale();
    if (!(k2 >= 2.0 * d * d)) throw std::invalid_argument("bifurcation_direction needs kappa^2 >= 2 d^2");
    const int ad = std::abs(d);
    const Threshold th = threshold_g(kappa, ad, grid);
    const auto core = cached_normal_core(kappa, ad, grid);
    const ModelParams params{kappa, ad, th.g_star};
    const std::size_t n = grid->size(), nf = params.field_count();
    const auto w = grid->weights();
    const auto& wk = th.ground.vec;

    SymBandMatrix H = energy_hessian(params, *core);
    std::vector<std::size_t> pinned = clamped_dofs(params, n);
    for (std::size_t i = 0; i < n; ++i) pinned.push_back(i * nf + nf - 1);
    for (std::size_t k : pinned) H.pin(k);
    std::vector<double> rhs(n * nf, 0.0);
    for (std::size_t i = 0; i < n; ++i) rhs[i * nf] = -w[i] * 2.0 * k2 * core->f[i] * wk[i] * wk[i];
    for (std::size_t k : pinned) rhs[k] = 0.0;
    const auto chol = BandCholesky::factor(H);
    if (!chol) throw SingularSystem("(f, S) block of the linearization is not positive definite");
    chol->solve_in_place(rhs);

    BifurcationDirection out;
    out.g_star = th.g_star;
    out.u_star.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.u_star[i] = rhs[i * nf];
        const double w2 = wk[i] * wk[i];
        out.f_u_w2 += w[i] * core->f[i] * out.u_star[i] * w2;
        out.w4 += w[i] * w2 * w2;
        out.w2 += w[i] * w2;
    }
    out.gamma2 = -2.0 * (out.f_u_w2 + out.w4) / out.w2;
    return out;
}

UniquenessReport uniqueness_probe(const Kappa& kappa, int d, double g, GridPtr grid, int n_starts,
                                  std::uint64_t rng_seed, const SolveOptions& opts) {
    if (n_starts < 1) throw std::invalid_argument("uniqueness_probe: n_starts must be positive");
    const ModelParams params{kappa, d, g};
    params.validate();
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> amp(0.05, 0.8), width(1.0, 6.0), wobble(-0.1, 0.1);
    const auto core = cached_normal_core(kappa, d, grid);
    const auto r = grid->r();

    UniquenessReport rep;
    for (int k = 0; k < n_starts; ++k) {
        const double A = amp(rng), L = width(rng), eps = wobble(rng);
        Profile seed = *core;
        for (std::size_t i = 0; i < seed.size(); ++i) {
            const double bump = std::exp(-(r[i] / L) * (r[i] / L));
            seed.m[i] = A * bump;
            seed.f[i] *= 1.0 + eps * bump;
        }
        SolveOptions so = opts;
        so.seed = Seed::custom(std::move(seed));
        try {
            Solution s = solve(params, grid, so);
            rep.max_m = std::max(rep.max_m, *std::max_element(s.profile.m.begin(), s.profile.m.end()));
            rep.solutions.push_back(std::move(s.profile));
            ++rep.converged;
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "start " << k << ": " << e.what();
            rep.failures.push_back(os.str());
        }
    }
    for (std::size_t a = 0; a < rep.solutions.size(); ++a)
        for (std::size_t b = a + 1; b < rep.solutions.size(); ++b)
            rep.max_pairwise_dist = std::max(rep.max_pairwise_dist, sup_distance(rep.solutions[a], rep.solutions[b]));
    return rep;
}

}  // namespace vortex
