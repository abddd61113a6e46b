#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "vortex/diagnostics.hpp"
#include "vortex/model.hpp"
#include "vortex/solver.hpp"

using namespace vortex;

namespace {

// Smooth, non-stationary fields for derivative checks.
Profile analytic_profile(GridPtr grid, int d) {
    Profile p = Profile::zeros(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->r()[i];
        p.f[i] = std::tanh(r);
        p.S[i] = d * r * r / (1.0 + r * r);
        p.m[i] = 0.4 * std::exp(-r * r / 4.0);
    }
    return p;
}

// Continuous energy of analytic_profile on [0, R] by composite Simpson on a
// fine uniform mesh, with the r -> 0 limits of the singular integrands.
double analytic_energy(double kappa2, bool magnetic, int d, double g, double R) {
    auto density = [&](double r) {
        const double f = std::tanh(r), fp = 1.0 - f * f;
        const double S = d * r * r / (1.0 + r * r), Sp = 2.0 * d * r / ((1.0 + r * r) * (1.0 + r * r));
        const double m = 0.4 * std::exp(-r * r / 4.0), mp = -0.5 * r * m;
        const double f_over_r = r > 0 ? f / r : 1.0;
        const double Sp_over_r = r > 0 ? Sp / r : 2.0 * d;
        const double t = 1.0 - f * f - m * m;
        double e = fp * fp + mp * mp + kappa2 * g * m * m + 0.5 * kappa2 * t * t;
        if (magnetic)
            e += Sp_over_r * Sp_over_r + (d - S) * (d - S) * f_over_r * f_over_r;
        else
            e += d * d * f_over_r * f_over_r;
        return 0.5 * e * r;
    };
    const int n = 400000;
    const double h = R / n;
    double s = density(0.0) + density(R);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * density(i * h);
    return s * h / 3.0;
}

TangentDirection random_direction(const RadialGrid& grid, std::mt19937_64& rng, bool with_v) {
    std::normal_distribution<double> nd(0.0, 1.0);
    const double R = grid.r_max();
    const std::size_t n = grid.size();
    TangentDirection t = TangentDirection::zeros(n);
    for (int k = 1; k <= 6; ++k) {
        const double a = nd(rng) / k, b = nd(rng) / k, c = nd(rng) / k;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = grid.r()[i];
            t.u[i] += a * std::sin(k * M_PI * r / R);
            t.w[i] += b * std::cos((k - 0.5) * M_PI * r / R);
            if (with_v) t.v[i] += c * std::sin(k * M_PI * r / R);
        }
    }
    t.u.back() = 0.0;
    t.w.back() = 0.0;
    if (with_v) t.v.back() = 0.0;
    return t;
}

Profile displaced(const Profile& p, const TangentDirection& dir, double t) {
    Profile q = p;
    const auto r = p.grid->r();
    for (std::size_t i = 0; i < p.size(); ++i) {
        q.f[i] += t * dir.u[i];
        q.S[i] += t * r[i] * dir.v[i];
        q.m[i] += t * dir.w[i];
    }
    return q;
}

double weighted_inner(const RadialGrid& grid, const TangentDirection& a, const TangentDirection& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        s += grid.weights()[i] * (a.u[i] * b.u[i] + a.v[i] * b.v[i] + a.w[i] * b.w[i]);
    return s;
}

}  // namespace

TEST_CASE("Kappa parsing and validation") {
    CHECK(Kappa::parse("inf").is_infinite());
    CHECK(Kappa::parse("Infinity").is_infinite());
    CHECK(Kappa::parse("20").value() == 20.0);
    CHECK_THROWS_AS(Kappa::parse("0"), std::invalid_argument);
    CHECK_THROWS_AS(Kappa::parse("-3"), std::invalid_argument);
    CHECK_THROWS_AS(Kappa::parse("abc"), std::invalid_argument);
    CHECK(Kappa::infinite().potential_scale() == 1.0);
    CHECK(Kappa::finite(3.0).potential_scale() == 9.0);
    CHECK_THROWS_AS((ModelParams{Kappa::finite(2.0), 0, 0.1}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ModelParams{Kappa::finite(2.0), 1, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ModelParams{Kappa::finite(2.0), 1, NAN}.validate()), std::invalid_argument);
}

TEST_CASE("discrete energy converges to the continuous energy at second order") {
    for (const bool magnetic : {true, false}) {
        CAPTURE(magnetic);
        const Kappa k = magnetic ? Kappa::finite(2.0) : Kappa::infinite();
        const ModelParams params{k, 1, 0.3};
        const double exact = analytic_energy(k.potential_scale(), magnetic, 1, 0.3, 20.0);
        const double e1 = std::abs(energy(params, analytic_profile(build_grid(1001, 20.0), 1)).total - exact);
        const double e2 = std::abs(energy(params, analytic_profile(build_grid(2001, 20.0), 1)).total - exact);
        CAPTURE(e1);
        CAPTURE(e2);
        CHECK(e2 < 1e-3);
        CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
    }
}

TEST_CASE("energy breakdown sums to total") {
    const ModelParams params{Kappa::finite(3.0), 2, 0.2};
    const auto e = energy(params, analytic_profile(build_grid(501, 20.0), 2));
    CHECK(e.total == doctest::Approx(e.grad_f + e.magnetic + e.grad_m + e.mass_m + e.winding + e.potential));
    CHECK(e.magnetic > 0.0);
}

TEST_CASE("energy gradient matches central differences with O(t^2) error") {
    std::mt19937_64 rng(11);
    for (const bool magnetic : {true, false}) {
        CAPTURE(magnetic);
        const ModelParams params{magnetic ? Kappa::finite(2.0) : Kappa::infinite(), 1, 0.3};
        const auto grid = build_grid(401, 20.0);
        const Profile p = analytic_profile(grid, 1);
        const auto dir = random_direction(*grid, rng, magnetic);
        const auto grad = energy_gradient(params, p);
        // directional derivative from the raw gradient in value coordinates
        Profile dp = Profile::zeros(grid);
        for (std::size_t i = 0; i < grid->size(); ++i) {
            dp.f[i] = dir.u[i];
            dp.S[i] = magnetic ? grid->r()[i] * dir.v[i] : 0.0;
            dp.m[i] = dir.w[i];
        }
        const auto x = pack(params, dp);
        double exact = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) exact += grad[k] * x[k];
        auto fd_err = [&](double t) {
            const double ep = energy(params, displaced(p, dir, t)).total;
            const double em = energy(params, displaced(p, dir, -t)).total;
            return std::abs((ep - em) / (2 * t) - exact);
        };
        const double ratio = fd_err(1e-2) / fd_err(1e-3);
        CAPTURE(ratio);
        CHECK(ratio > 80.0);
        CHECK(ratio < 120.0);
    }
}

TEST_CASE("residual is the gradient in the quadrature inner product") {
    std::mt19937_64 rng(12);
    for (const bool magnetic : {true, false}) {
        CAPTURE(magnetic);
        const ModelParams params{magnetic ? Kappa::finite(2.0) : Kappa::infinite(), 1, 0.3};
        const auto grid = build_grid(401, 20.0, Grading::graded(1.5));
        const Profile p = analytic_profile(grid, 1);
        auto dir = random_direction(*grid, rng, magnetic);
        dir.v[0] = 0.0;
        const auto res = residual(params, p);
        // clamped rows hold defects, so drop them from the pairing
        TangentDirection masked = dir;
        masked.u[0] = masked.u.back() = 0.0;
        masked.w.back() = 0.0;
        masked.v.back() = 0.0;
        TangentDirection rmask = res;
        rmask.u[0] = rmask.u.back() = 0.0;
        rmask.w.back() = 0.0;
        rmask.v[0] = rmask.v.back() = 0.0;
        const double t = 1e-5;
        const double fd = (energy(params, displaced(p, masked, t)).total - energy(params, displaced(p, masked, -t)).total) /
                          (2 * t);
        CHECK(weighted_inner(*grid, rmask, masked) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("Hessian is symmetric and matches differences of the gradient") {
    std::mt19937_64 rng(13);
    for (const bool magnetic : {true, false}) {
        CAPTURE(magnetic);
        const ModelParams params{magnetic ? Kappa::finite(2.0) : Kappa::infinite(), 1, 0.3};
        const auto grid = build_grid(401, 20.0);
        const Profile p = analytic_profile(grid, 1);
        const HessianOperator H(params, p);
        const auto a = random_direction(*grid, rng, magnetic);
        const auto b = random_direction(*grid, rng, magnetic);
        const double ab = H.form(a, b), ba = H.form(b, a);
        CHECK(std::abs(ab - ba) <= 1e-10 * std::max(1.0, std::abs(ab)));
        CHECK(weighted_inner(*grid, H.apply(b), a) == doctest::Approx(ab).epsilon(1e-10));

        // second difference of the energy along a
        const double t = 1e-4;
        const double e0 = energy(params, p).total;
        const double second = (energy(params, displaced(p, a, t)).total - 2 * e0 +
                               energy(params, displaced(p, a, -t)).total) /
                              (t * t);
        CHECK(H.quadratic(a) == doctest::Approx(second).epsilon(1e-5));
    }
}

TEST_CASE("energy is invariant under f -> -f, m -> -m and (d, S) -> (-d, -S)") {
    const ModelParams params{Kappa::finite(2.0), 1, 0.3};
    const auto grid = build_grid(301, 20.0);
    const Profile p = analytic_profile(grid, 1);
    const double e = energy(params, p).total;
    Profile q = p;
    for (auto& x : q.f) x = -x;
    for (auto& x : q.m) x = -x;
    CHECK(energy(params, q).total == doctest::Approx(e).epsilon(1e-14));
    const auto [rp, rq] = reflect(params, p);
    CHECK(rp.d == -1);
    CHECK(energy(rp, rq).total == doctest::Approx(e).epsilon(1e-14));
    CHECK(sup_norm(residual(rp, rq)) == doctest::Approx(sup_norm(residual(params, p))).epsilon(1e-12));
}

TEST_CASE("pack and unpack are inverse") {
    for (const bool magnetic : {true, false}) {
        const ModelParams params{magnetic ? Kappa::finite(2.0) : Kappa::infinite(), 1, 0.3};
        const auto grid = build_grid(50, 5.0);
        const Profile p = analytic_profile(grid, 1);
        const auto x = pack(params, p);
        CHECK(x.size() == grid->size() * params.field_count());
        Profile q = Profile::zeros(grid);
        unpack(params, x, q);
        CHECK(q.f == p.f);
        CHECK(q.m == p.m);
        if (magnetic) CHECK(q.S == p.S);
    }
}

TEST_CASE("Pohozaev residual separates solutions from non-solutions") {
    const auto grid = build_grid(4001, 40.0);
    const ModelParams params{Kappa::infinite(), 1, 0.1};
    SolveOptions opts;
    opts.seed = Seed::perturbed(0.1);
    const auto sol = solve(params, grid, opts);
    CHECK(pohozaev_residual(params, sol.profile).rel_err < 1e-3);
    // stretched copy: same boundary values, wrong core size
    Profile stretched = sol.profile;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        const double r = grid->r()[i];
        stretched.f[i] = interpolate(*grid, sol.profile.f, 0.7 * r);
        stretched.m[i] = interpolate(*grid, sol.profile.m, 0.7 * r);
    }
    CHECK(pohozaev_residual(params, stretched).rel_err > 0.1);
}

TEST_CASE("quotient form with c = 2 reproduces the second variation at an AF solution") {
    const auto grid = build_grid(2001, 40.0);
    const ModelParams params{Kappa::infinite(), 1, 0.1};
    SolveOptions opts;
    opts.seed = Seed::perturbed(0.1);
    const auto sol = solve(params, grid, opts);
    REQUIRE(sol.profile.m0() > 0.5);
    const HessianOperator H(params, sol.profile);
    std::mt19937_64 rng(21);
    double num = 0.0, den = 0.0, worst2 = 0.0, best4 = 1e300;
    for (int k = 0; k < 20; ++k) {
        const auto dir = random_direction(*grid, rng, false);
        const double h = H.quadratic(dir);
        const auto parts = quotient_parts(params, sol.profile, dir);
        worst2 = std::max(worst2, std::abs(quotient_form(params, sol.profile, dir, 2.0) - h) / std::abs(h));
        best4 = std::min(best4, std::abs(quotient_form(params, sol.profile, dir, 4.0) - h) / std::abs(h));
        // least squares for c in h = gradient_part + c coupling
        num += parts.coupling * (h - parts.gradient_part);
        den += parts.coupling * parts.coupling;
    }
    CHECK(worst2 < 1e-3);
    CHECK(best4 > 1e-2);
    CHECK(num / den == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("quotient form rejects unsuitable inputs") {
    const auto grid = build_grid(101, 10.0);
    const Profile p = analytic_profile(grid, 1);
    const auto dir = TangentDirection::zeros(grid->size());
    CHECK_THROWS_AS(quotient_form(ModelParams{Kappa::finite(2.0), 1, 0.1}, p, dir), std::invalid_argument);
    Profile q = p;
    q.m[5] = 0.0;
    CHECK_THROWS_AS(quotient_form(ModelParams{Kappa::infinite(), 1, 0.1}, q, dir), std::invalid_argument);
}
