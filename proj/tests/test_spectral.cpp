#include <doctest.h>

#include <cmath>
#include <vector>

#include "vortex/solver.hpp"
#include "vortex/spectral.hpp"

using namespace vortex;

namespace {

double bessel_j0(double r) {
    const double q = -0.25 * r * r;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 80; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

// First zero of J0 by bisection on the series.
double j0_first_zero() {
    double lo = 2.0, hi = 3.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (bessel_j0(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("free radial Laplacian: lowest eigenvalue is (j01 / R)^2") {
    const double j01 = j0_first_zero();
    CHECK(j01 == doctest::Approx(2.404826).epsilon(1e-6));
    double prev_err = 0.0;
    for (std::size_t n : {501u, 1001u, 2001u}) {
        const auto grid = build_grid(n, 10.0);
        const std::vector<double> V(n, 0.0);
        const auto e = ground_state(*grid, V);
        const double exact = (j01 / 10.0) * (j01 / 10.0);
        const double err = std::abs(e.lambda - exact);
        CHECK(err / exact < 1e-4);
        if (prev_err > 0) CHECK(prev_err / err == doctest::Approx(4.0).epsilon(0.1));
        prev_err = err;
        // eigenvector is J0(j01 r / R), positive, unit quadrature norm
        double nrm = 0.0, dot = 0.0, jj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = grid->weights()[i], j = bessel_j0(j01 * grid->r()[i] / 10.0);
            nrm += w * e.vec[i] * e.vec[i];
            dot += w * e.vec[i] * j;
            jj += w * j * j;
            if (i + 1 < n) CHECK(e.vec[i] > 0.0);
        }
        CHECK(nrm == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(dot / std::sqrt(jj) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(e.residual < 1e-8);
        CHECK_FALSE(e.degenerate);
    }
}

TEST_CASE("eigenvalue scales as 1/R^2 and shifts with a constant potential") {
    const auto a = ground_state(*build_grid(2001, 10.0), std::vector<double>(2001, 0.0));
    const auto b = ground_state(*build_grid(4001, 20.0), std::vector<double>(4001, 0.0));
    CHECK(b.lambda / a.lambda == doctest::Approx(0.25).epsilon(1e-6));
    const auto c = ground_state(*build_grid(2001, 10.0), std::vector<double>(2001, 0.7));
    CHECK(c.lambda == doctest::Approx(a.lambda - 0.7).epsilon(1e-10));
}

TEST_CASE("Dirichlet origin raises the ground state") {
    const auto grid = build_grid(1001, 10.0);
    const std::vector<double> V(1001, 0.0);
    const auto n = ground_state(*grid, V, OriginBC::neumann0);
    const auto d = ground_state(*grid, V, OriginBC::dirichlet0);
    CHECK(d.lambda > n.lambda);
    CHECK(d.vec[0] == 0.0);
}

TEST_CASE("Rayleigh quotient bounds the ground state from above") {
    const auto grid = build_grid(2001, 20.0);
    std::vector<double> V(grid->size());
    for (std::size_t i = 0; i < V.size(); ++i) V[i] = 2.0 * std::exp(-grid->r()[i] * grid->r()[i]);
    const auto e = ground_state(*grid, V);
    CHECK(rayleigh_quotient(*grid, V, e.vec) == doctest::Approx(e.lambda).epsilon(1e-10));
    for (double width : {1.0, 2.0, 4.0}) {
        std::vector<double> t(grid->size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::exp(-std::pow(grid->r()[i] / width, 2));
        t.back() = 0.0;
        CHECK(rayleigh_quotient(*grid, V, t) >= e.lambda);
    }
    // a well of depth 2 binds: lambda < 0
    CHECK(e.lambda < 0.0);
}

TEST_CASE("threshold of the limit system") {
    const auto t = threshold_g(Kappa::infinite(), 1, default_grid(Kappa::infinite()));
    CHECK(t.g_star >= 0.2525);
    CHECK(t.g_star <= 0.2565);
    CHECK(t.g_star == doctest::Approx(-t.lambda0));
    // regression baseline from this implementation on the default grid
    CHECK(t.g_star == doctest::Approx(0.25450143859738894).epsilon(1e-9));
    // the eigenfunction reproduces lambda0 through the Rayleigh quotient
    const auto core = cached_normal_core(Kappa::infinite(), 1, default_grid(Kappa::infinite()));
    std::vector<double> V(core->size());
    for (std::size_t i = 0; i < V.size(); ++i) V[i] = 1.0 - core->f[i] * core->f[i];
    CHECK(rayleigh_quotient(*core->grid, V, t.ground.vec) == doctest::Approx(t.lambda0).epsilon(1e-6));
}

TEST_CASE("threshold at finite kappa") {
    const auto t = threshold_g(Kappa::finite(20.0), 1, default_grid(Kappa::finite(20.0)));
    CHECK(t.g_star == doctest::Approx(-t.lambda0 / 400.0));
    // regression baseline (kappa = 20, default graded grid)
    CHECK(t.g_star == doctest::Approx(0.2502263224930727).epsilon(1e-8));
    // kappa = 2 still has a threshold in (0, 1)
    const auto t2 = threshold_g(Kappa::finite(2.0), 1, default_grid(Kappa::finite(2.0)));
    CHECK(t2.g_star > 0.0);
    CHECK(t2.g_star < 1.0);
}

TEST_CASE("normal-core Hessian changes sign at g*") {
    const auto grid = default_grid(Kappa::infinite());
    const auto t = threshold_g(Kappa::infinite(), 1, grid);
    const auto core = cached_normal_core(Kappa::infinite(), 1, grid);
    const auto below = hessian_min_eig(ModelParams{Kappa::infinite(), 1, t.g_star - 0.02}, *core);
    const auto above = hessian_min_eig(ModelParams{Kappa::infinite(), 1, t.g_star + 0.02}, *core);
    CHECK(below.lambda < 0.0);
    CHECK(above.lambda > 0.0);
    // the unstable direction lives in m
    double wm = 0.0, uf = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
        wm += grid->weights()[i] * below.vec.w[i] * below.vec.w[i];
        uf += grid->weights()[i] * below.vec.u[i] * below.vec.u[i];
    }
    CHECK(wm > 0.99 * (wm + uf));
    // and the m-block eigenvalue is exactly lambda0 + g
    CHECK(below.lambda == doctest::Approx(t.lambda0 + t.g_star - 0.02).epsilon(1e-8));
}
