#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "vortex/grid.hpp"

using namespace vortex;

namespace {

// J0 by its power series; plenty for r <= 12.
double bessel_j0(double r) {
    const double q = -0.25 * r * r;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 80; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

template <class F>
std::vector<double> sample(const RadialGrid& g, F fn) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = fn(g.r()[i]);
    return v;
}

// max |L u - expected| over nodes 1..n-2 (and the origin for neumann0).
template <class F, class G>
double laplacian_error(const RadialGrid& g, F u, G expected, OriginBC bc) {
    const auto lu = apply_radial_laplacian(g, sample(g, u), bc);
    double err = 0.0;
    const std::size_t first = bc == OriginBC::neumann0 ? 0 : 1;
    for (std::size_t i = first; i + 1 < g.size(); ++i) err = std::max(err, std::abs(lu[i] - expected(g.r()[i])));
    return err;
}

}  // namespace

TEST_CASE("build_grid validates its arguments") {
    CHECK_THROWS_AS(build_grid(15, 40.0), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(4001, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(4001, -1.0), std::invalid_argument);
    CHECK_NOTHROW(build_grid(16, 1.0));
}

TEST_CASE("uniform grid spacing and endpoints") {
    const auto g = build_grid(4001, 40.0);
    CHECK(g->size() == 4001);
    CHECK(g->r().front() == 0.0);
    CHECK(g->r().back() == 40.0);
    for (double h : g->widths()) CHECK(h == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("grid invariants hold for uniform and graded grids") {
    for (const Grading gr : {Grading::uniform(), Grading::graded(2.0), Grading::graded(core_grading_strength(120.0))}) {
        CAPTURE(gr.to_string());
        const auto g = build_grid(2001, 40.0, gr);
        const auto r = g->r();
        CHECK(r[0] == 0.0);
        for (std::size_t i = 1; i < r.size(); ++i) CHECK(r[i] > r[i - 1]);
        for (double w : g->weights()) CHECK(w > 0.0);
        const std::vector<double> one(g->size(), 1.0);
        CHECK(std::abs(integrate(*g, one) - 800.0) <= 1e-12 * 800.0);
    }
}

TEST_CASE("interior weights equal the trapezoid weights r h on a uniform grid") {
    const auto g = build_grid(101, 10.0);
    for (std::size_t i = 1; i + 1 < g->size(); ++i)
        CHECK(g->weights()[i] == doctest::Approx(g->r()[i] * 0.1).epsilon(1e-12));
    CHECK(g->weights()[0] == doctest::Approx(0.01 / 8));
}

TEST_CASE("quadrature on smooth integrands") {
    SUBCASE("exp(-r) integrates to 1") {
        const auto g = build_grid(16001, 40.0);
        const double exact = 1.0 - 41.0 * std::exp(-40.0);
        CHECK(std::abs(integrate(*g, sample(*g, [](double r) { return std::exp(-r); })) - exact) < 1e-6);
    }
    SUBCASE("u = r and u = r^2 converge at second order") {
        double prev1 = 0, prev2 = 0;
        for (std::size_t n : {101u, 201u, 401u}) {
            const auto g = build_grid(n, 4.0);
            const double e1 = std::abs(integrate(*g, sample(*g, [](double r) { return r; })) - 64.0 / 3.0);
            const double e2 = std::abs(integrate(*g, sample(*g, [](double r) { return r * r; })) - 64.0);
            if (prev1 > 0) {
                CHECK(prev1 / e1 == doctest::Approx(4.0).epsilon(0.05));
                CHECK(prev2 / e2 == doctest::Approx(4.0).epsilon(0.05));
            }
            prev1 = e1;
            prev2 = e2;
        }
    }
    CHECK_THROWS_AS(integrate(*build_grid(16, 1.0), std::vector<double>(3, 1.0)), std::invalid_argument);
}

TEST_CASE("radial Laplacian on analytic functions") {
    const auto g = build_grid(801, 8.0);
    SUBCASE("1 - r^2/4 with neumann0 gives 1") {
        CHECK(laplacian_error(*g, [](double r) { return 1.0 - r * r / 4.0; }, [](double) { return 1.0; },
                              OriginBC::neumann0) < 1e-10);
    }
    SUBCASE("r with dirichlet0 gives -1/r") {
        const double e = laplacian_error(*g, [](double r) { return r; }, [](double r) { return -1.0 / r; },
                                         OriginBC::dirichlet0);
        CHECK(e < 1e-3);
    }
    SUBCASE("J0 is an eigenfunction with eigenvalue 1") {
        const double e =
            laplacian_error(*g, bessel_j0, [](double r) { return bessel_j0(r); }, OriginBC::neumann0);
        CHECK(e < 1e-4);
    }
    SUBCASE("dirichlet0 origin row is zero") {
        const auto lu = apply_radial_laplacian(*g, sample(*g, bessel_j0), OriginBC::dirichlet0);
        CHECK(lu[0] == 0.0);
        CHECK(lu.back() == 0.0);
    }
}

TEST_CASE("radial Laplacian refinement ratio") {
    auto u = [](double r) { return std::exp(-r * r) * std::cos(r); };
    // -lap of u, from u'' + u'/r with the product rule done by hand.
    auto lap = [](double r) {
        const double e = std::exp(-r * r), c = std::cos(r), s = std::sin(r);
        const double up = e * (-2 * r * c - s);
        const double upp = e * ((4 * r * r - 2) * c + 4 * r * s - c);
        return -(upp + (r > 0 ? up / r : upp));
    };
    for (const Grading gr : {Grading::uniform(), Grading::graded(2.0)}) {
        CAPTURE(gr.to_string());
        const double e1 = laplacian_error(*build_grid(401, 6.0, gr), u, lap, OriginBC::neumann0);
        const double e2 = laplacian_error(*build_grid(801, 6.0, gr), u, lap, OriginBC::neumann0);
        const double ratio = e1 / e2;
        CAPTURE(ratio);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }
}

TEST_CASE("radial Laplacian is symmetric in the quadrature inner product") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (const Grading gr : {Grading::uniform(), Grading::graded(3.0)}) {
        const auto g = build_grid(300, 10.0, gr);
        std::vector<double> u(g->size(), 0.0), v(g->size(), 0.0);
        for (std::size_t i = 5; i + 5 < g->size(); ++i) {
            u[i] = dist(rng);
            v[i] = dist(rng);
        }
        for (const OriginBC bc : {OriginBC::neumann0, OriginBC::dirichlet0}) {
            const auto lu = apply_radial_laplacian(*g, u, bc);
            const auto lv = apply_radial_laplacian(*g, v, bc);
            double a = 0, b = 0, scale = 0;
            for (std::size_t i = 0; i < g->size(); ++i) {
                a += g->weights()[i] * lu[i] * v[i];
                b += g->weights()[i] * u[i] * lv[i];
                scale += std::abs(g->weights()[i] * lu[i] * v[i]);
            }
            CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("grading round trip and strength") {
    CHECK(Grading::parse("uniform").kind == Grading::Kind::uniform);
    const auto g = Grading::parse(Grading::graded(4.25).to_string());
    CHECK(g.kind == Grading::Kind::graded);
    CHECK(g.strength == 4.25);
    CHECK_THROWS_AS(Grading::parse("sinh"), std::invalid_argument);
    CHECK(core_grading_strength(1.0) == 0.0);
    const double s = core_grading_strength(120.0);
    CHECK(s / std::sinh(s) == doctest::Approx(1.0 / 120.0).epsilon(1e-6));
    const auto grid = build_grid(4001, 40.0, Grading::graded(s));
    CHECK(grid->min_width() == doctest::Approx(0.01 / 120.0).epsilon(0.01));
}

TEST_CASE("from_nodes rejects bad node lists") {
    std::vector<double> r(20);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<double>(i);
    CHECK_NOTHROW(RadialGrid::from_nodes(r, Grading::uniform()));
    auto bad = r;
    bad[0] = 0.5;
    CHECK_THROWS_AS(RadialGrid::from_nodes(bad, Grading::uniform()), std::invalid_argument);
    bad = r;
    bad[7] = bad[6];
    CHECK_THROWS_AS(RadialGrid::from_nodes(bad, Grading::uniform()), std::invalid_argument);
}
