#include "vortex/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "vortex/errors.hpp"
#include "vortex/spectral.hpp"

namespace vortex {

void DiagnosticsReport::below(const std::string& name, double measured, double threshold) {
    const bool ok = measured < threshold;
    checks.push_back({name, ok, measured, threshold});
    overall = overall && ok;
}

void DiagnosticsReport::above(const std::string& name, double measured, double threshold) {
    const bool ok = measured > threshold;
    checks.push_back({name, ok, measured, threshold});
    overall = overall && ok;
}

const Check* DiagnosticsReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

DiagnosticsReport check_admissible(const ModelParams& params_in, const Profile& p_in, double slack) {
    ModelParams params = params_in;
    Profile p = p_in;
    if (params.d < 0) std::tie(params, p) = reflect(params_in, p_in);
    const std::size_t n = p.size();

    double f_min = INFINITY, f_max = -INFINITY, m_min = INFINITY, m_max = -INFINITY, fm_max = -INFINITY;
    double S_min = INFINITY, S_max = -INFINITY;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        f_min = std::min(f_min, p.f[i]);
        f_max = std::max(f_max, p.f[i]);
        m_min = std::min(m_min, p.m[i]);
        m_max = std::max(m_max, p.m[i]);
        fm_max = std::max(fm_max, p.f[i] * p.f[i] + p.m[i] * p.m[i]);
        S_min = std::min(S_min, p.S[i]);
        S_max = std::max(S_max, p.S[i]);
    }
    // m(0) belongs to the bounds too (Neumann node)
    m_max = std::max(m_max, p.m[0]);
    fm_max = std::max(fm_max, p.m[0] * p.m[0]);

    double df_min = INFINITY, dm_max = -INFINITY, dS_min = INFINITY;
    for (std::size_t c = 0; c + 1 < n; ++c) {
        df_min = std::min(df_min, p.f[c + 1] - p.f[c]);
        dS_min = std::min(dS_min, p.S[c + 1] - p.S[c]);
        if (p.m[c] > slack) dm_max = std::max(dm_max, p.m[c + 1] - p.m[c]);
    }
    if (dm_max == -INFINITY) dm_max = 0.0;

    DiagnosticsReport rep;
    rep.above("f_positive", f_min, -slack);
    rep.below("f_below_one", f_max, 1.0 + slack);
    rep.above("m_nonnegative", m_min, -slack);
    rep.below("m_below_one", m_max, 1.0 + slack);
    rep.below("f2_plus_m2_below_one", fm_max, 1.0 + slack);
    rep.above("f_increasing", df_min, -slack);
    rep.below("m_decreasing_where_positive", dm_max, slack);
    if (params.has_magnetic_field()) {
        rep.above("S_positive", S_min, -slack);
        rep.below("S_below_d", S_max, params.d + slack);
        rep.above("S_increasing", dS_min, -slack);
    }
    // either a normal core or m > 0 everywhere inside
    const bool normal = m_max < 1e-8;
    Check dich{"m_dichotomy", normal || m_min > -slack, normal ? m_max : m_min, normal ? 1e-8 : -slack};
    rep.checks.push_back(dich);
    rep.overall = rep.overall && dich.passed;
    return rep;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw InsufficientPoints("fit_line needs at least two points");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw InsufficientPoints("fit_line: abscissae are all equal");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

DecayFit decay_fit(const ModelParams& params_in, const Profile& p_in, TailField field) {
    ModelParams params = params_in;
    Profile p = p_in;
    if (params.d < 0) std::tie(params, p) = reflect(params_in, p_in);
    const RadialGrid& grid = *p.grid;
    const auto r = grid.r();
    DecayFit fit;
    fit.r_lo = 0.5 * grid.r_max();
    fit.r_hi = 0.9 * grid.r_max();
    if (field == TailField::s_deficit && !params.has_magnetic_field())
        throw std::invalid_argument("decay_fit: no S field in the limit system");

    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (r[i] < fit.r_lo || r[i] > fit.r_hi) continue;
        double y = 0.0;
        switch (field) {
            case TailField::f_deficit: y = 1.0 - p.f[i]; break;
            case TailField::m: y = p.m[i]; break;
            case TailField::s_deficit: y = params.d - p.S[i]; break;
        }
        if (y > 1e-14) {
            xs.push_back(r[i]);
            ys.push_back(y);
        }
    }
    if (xs.size() < 3) throw DegenerateTail("decay_fit: field below 1e-14 throughout the tail window");
    fit.points = static_cast<int>(xs.size());

    if (field == TailField::f_deficit && !params.has_magnetic_field()) {
        // r^2 (1 - f) = a + b / r^2
        fit.model = DecayFit::Model::inverse_square;
        std::vector<double> X(xs.size()), Y(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) {
            X[k] = 1.0 / (xs[k] * xs[k]);
            Y[k] = ys[k] * xs[k] * xs[k];
        }
        const LineFit lf = fit_line(X, Y);
        fit.coeff = lf.intercept;
        fit.second = lf.slope;
        // quality of the model for 1 - f itself
        double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size(), ss = 0.0, se = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double pred = fit.coeff * X[k] + fit.second * X[k] * X[k];
            se += (ys[k] - pred) * (ys[k] - pred);
            ss += (ys[k] - mean) * (ys[k] - mean);
        }
        fit.r2 = ss > 0.0 ? std::clamp(1.0 - se / ss, 0.0, 1.0) : 1.0;
        return fit;
    }
    fit.model = DecayFit::Model::exponential;
    std::vector<double> ly(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) ly[k] = std::log(ys[k]);
    const LineFit lf = fit_line(xs, ly);
    fit.sigma = -lf.slope;
    fit.C0 = std::exp(lf.intercept);
    fit.r2 = std::clamp(lf.r2, 0.0, 1.0);
    return fit;
}

double h_norm(const RadialGrid& grid, std::span<const double> u) {
    if (u.size() != grid.size()) throw std::invalid_argument("h_norm: length mismatch");
    const auto w = grid.weights();
    const auto stiff = grid.stiffness();
    double s = 0.0;
    for (std::size_t c = 0; c + 1 < u.size(); ++c) s += stiff[c] * (u[c + 1] - u[c]) * (u[c + 1] - u[c]);
    for (std::size_t i = 0; i < u.size(); ++i) s += w[i] * u[i] * u[i];
    return std::sqrt(s);
}

double x_norm(const RadialGrid& grid, std::span<const double> u) {
    const double h = h_norm(grid, u);
    const auto w = grid.weights();
    const auto ir2 = grid.inv_r2();
    double s = h * h;
    for (std::size_t i = 1; i < u.size(); ++i) s += w[i] * ir2[i] * u[i] * u[i];
    return std::sqrt(s);
}

bool strictly_decreasing(std::span<const double> v, double slack) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1] - slack)) return false;
    return true;
}

bool strictly_increasing(std::span<const double> v, double slack) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1] + slack)) return false;
    return true;
}

double interpolate(const RadialGrid& grid, std::span<const double> values, double x) {
    const auto r = grid.r();
    if (x <= r.front()) return values.front();
    if (x >= r.back()) return values.back();
    const std::size_t k = static_cast<std::size_t>(std::upper_bound(r.begin(), r.end(), x) - r.begin()) - 1;
    const double t = (x - r[k]) / (r[k + 1] - r[k]);
    return (1.0 - t) * values[k] + t * values[k + 1];
}

LimitTable limit_check(std::span<const double> kappas, int d, double g, GridPtr inf_grid, const LimitOptions& opts) {
    if (kappas.empty()) throw InsufficientPoints("limit_check needs at least one kappa");
    LimitTable table;
    table.g = g;
    table.window = opts.window;

    const Kappa kinf = Kappa::infinite();
    SolveOptions so;
    so.seed = Seed::perturbed(0.1);
    auto inf_future = std::async(std::launch::async, [&] {
        return std::make_pair(solve({kinf, d, g}, inf_grid, so).profile, threshold_g(kinf, d, inf_grid).g_star);
    });

    std::vector<std::future<std::pair<Profile, double>>> jobs;
    for (double k : kappas) {
        jobs.push_back(std::async(std::launch::async, [k, d, g, &opts, so] {
            const Kappa kap = Kappa::finite(k);
            GridPtr grid = default_grid(kap, opts.n, opts.r_max);
            return std::make_pair(solve({kap, d, g}, grid, so).profile, threshold_g(kap, d, grid).g_star);
        }));
    }
    auto [pinf, gs_inf] = inf_future.get();
    table.g_star_inf = gs_inf;
    const auto rho = inf_grid->r();

    for (std::size_t j = 0; j < kappas.size(); ++j) {
        auto [pk, gs] = jobs[j].get();
        const double k = kappas[j];
        LimitRow row;
        row.kappa = k;
        row.g_star = gs;
        row.g_star_gap = std::abs(gs - gs_inf);
        row.m0 = pk.m0();
        for (std::size_t i = 0; i < rho.size() && rho[i] <= opts.window; ++i) {
            const double x = rho[i] / k;
            row.sup_f = std::max(row.sup_f, std::abs(interpolate(*pk.grid, pk.f, x) - pinf.f[i]));
            row.sup_m = std::max(row.sup_m, std::abs(interpolate(*pk.grid, pk.m, x) - pinf.m[i]));
            if (i > 0) row.sup_S_over_r = std::max(row.sup_S_over_r, std::abs(interpolate(*pk.grid, pk.S, x)) / rho[i]);
        }
        table.rows.push_back(row);
    }
    std::vector<double> cf, cm, cs, cg;
    for (const auto& r : table.rows) {
        cf.push_back(r.sup_f);
        cm.push_back(r.sup_m);
        cs.push_back(r.sup_S_over_r);
        cg.push_back(r.g_star_gap);
    }
    const bool ordered = strictly_increasing(kappas, 0.0);
    table.f_decreasing = ordered && strictly_decreasing(cf);
    table.m_decreasing = ordered && strictly_decreasing(cm);
    table.S_decreasing = ordered && strictly_decreasing(cs);
    table.g_star_decreasing = ordered && strictly_decreasing(cg);
    return table;
}

ScanTable g_to_zero_scan(const Kappa& kappa, int d, GridPtr grid, std::span<const double> g_list,
                         const SolveOptions& opts) {
    if (g_list.empty()) throw InsufficientPoints("g_to_zero_scan needs at least one g");
    if (!strictly_decreasing(g_list, 0.0)) throw std::invalid_argument("g_to_zero_scan: g_list must decrease");
    ScanTable table;
    SolveOptions so = opts;
    so.seed = Seed::perturbed(0.5);
    const auto r = grid->r();
    for (double g : g_list) {
        const ModelParams params{kappa, d, g};
        Solution s = solve(params, grid, so);
        ScanRow row;
        row.g = g;
        row.energy = referenced_energy(params, s.profile).total;
        row.m0 = s.profile.m0();
        for (std::size_t i = 0; i < r.size() && r[i] <= 5.0; ++i) row.max_f_core = std::max(row.max_f_core, s.profile.f[i]);
        table.rows.push_back(row);
        so.seed = Seed::custom(std::move(s.profile));
    }
    std::vector<double> e, m, f;
    for (const auto& row : table.rows) {
        e.push_back(row.energy);
        m.push_back(row.m0);
        f.push_back(row.max_f_core);
    }
    table.energy_decreasing = strictly_decreasing(e);
    table.m0_increasing = strictly_increasing(m);
    table.f_core_decreasing = strictly_decreasing(f);
    return table;
}

ScalingFit energy_scaling(std::span<const double> kappas, int d, double g, std::size_t n, double r_max) {
    if (kappas.size() < 2) throw InsufficientPoints("energy_scaling needs at least two kappas");
    ScalingFit out;
    std::vector<double> lk;
    std::vector<std::future<double>> jobs;
    for (double k : kappas) {
        jobs.push_back(std::async(std::launch::async, [=] {
            const Kappa kap = Kappa::finite(k);
            const ModelParams params{kap, d, g};
            GridPtr grid = default_grid(kap, n, r_max);
            SolveOptions so;
            so.seed = Seed::perturbed(0.1);
            return energy(params, solve(params, grid, so).profile).total;
        }));
        lk.push_back(std::log(k));
    }
    for (auto& j : jobs) out.energies.push_back(j.get());
    const LineFit lf = fit_line(lk, out.energies);
    out.slope = lf.slope;
    out.intercept = lf.intercept;
    out.r2 = lf.r2;
    return out;
}

}  // namespace vortex
