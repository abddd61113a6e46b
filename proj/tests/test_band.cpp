#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "vortex/band.hpp"
#include "vortex/spectral.hpp"

using namespace vortex;

namespace {

SymBandMatrix random_band(std::size_t n, std::size_t kd, double diag_shift, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    SymBandMatrix a(n, kd);
    for (std::size_t i = 0; i < n; ++i) {
        a.add(i, i, diag_shift + dist(rng));
        for (std::size_t j = i + 1; j <= std::min(n - 1, i + kd); ++j) a.add(i, j, dist(rng));
    }
    return a;
}

std::vector<std::vector<double>> dense(const SymBandMatrix& a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (std::max(i, j) - std::min(i, j) <= a.bandwidth()) m[i][j] = a.at(i, j);
    return m;
}

}  // namespace

TEST_CASE("band storage is symmetric and multiply matches the dense product") {
    const auto a = random_band(12, 3, 0.0, 1);
    const auto m = dense(a);
    std::vector<double> x(12), y(12);
    for (std::size_t i = 0; i < 12; ++i) x[i] = std::sin(1.0 + i);
    a.multiply(x, y);
    double q = 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < 12; ++j) {
            CHECK(m[i][j] == m[j][i]);
            s += m[i][j] * x[j];
        }
        CHECK(y[i] == doctest::Approx(s).epsilon(1e-14));
        q += x[i] * s;
    }
    CHECK(a.quadratic(x) == doctest::Approx(q).epsilon(1e-13));
}

TEST_CASE("Cholesky solves a positive definite band system") {
    const auto a = random_band(50, 2, 8.0, 2);
    auto chol = BandCholesky::factor(a);
    REQUIRE(chol.has_value());
    std::vector<double> x(50), b(50);
    for (std::size_t i = 0; i < 50; ++i) x[i] = 1.0 / (1.0 + i);
    a.multiply(x, b);
    chol->solve_in_place(b);
    for (std::size_t i = 0; i < 50; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("Cholesky reports indefinite matrices") {
    auto a = random_band(20, 1, 4.0, 3);
    a.add(7, 7, -20.0);
    CHECK_FALSE(BandCholesky::factor(a).has_value());
}

TEST_CASE("LU solves an indefinite band system") {
    auto a = random_band(40, 3, 0.0, 4);
    std::vector<double> x(40), b(40);
    for (std::size_t i = 0; i < 40; ++i) x[i] = std::cos(0.3 * i);
    a.multiply(x, b);
    REQUIRE(solve_band_lu(a, b));
    for (std::size_t i = 0; i < 40; ++i) CHECK(b[i] == doctest::Approx(x[i]).epsilon(1e-9));
}

TEST_CASE("pin replaces row and column") {
    auto a = random_band(10, 2, 3.0, 5);
    a.pin(4, 2.5);
    for (std::size_t j = 2; j <= 6; ++j) CHECK(a.at(4, j) == (j == 4 ? 2.5 : 0.0));
}

TEST_CASE("Gershgorin bounds bracket the lowest eigenvalue") {
    // 1D Dirichlet Laplacian: eigenvalues 2 - 2 cos(k pi / (n + 1)).
    const std::size_t n = 200;
    SymBandMatrix a(n, 1);
    for (std::size_t i = 0; i < n; ++i) {
        a.add(i, i, 2.0);
        if (i + 1 < n) a.add(i, i + 1, -1.0);
    }
    const double exact = 2.0 - 2.0 * std::cos(M_PI / (n + 1));
    CHECK(a.gershgorin_lower() <= exact);
    CHECK(a.gershgorin_upper() >= 4.0 - exact);
    const auto e = lowest_eigenpair(a);
    CHECK(e.lambda == doctest::Approx(exact).epsilon(1e-10));
    // eigenvector ~ sin(k pi i / (n + 1)), unit Euclidean norm
    double dot = 0.0, nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::sin(M_PI * (i + 1.0) / (n + 1));
        dot += s * e.vec[i];
        nrm += s * s;
    }
    CHECK(std::abs(dot) / std::sqrt(nrm) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("lowest eigenpair of an indefinite band matrix is certified by Cholesky inertia") {
    const auto a = random_band(30, 3, 0.0, 6);
    const auto e = lowest_eigenpair(a);
    std::vector<double> av(30);
    a.multiply(e.vec, av);
    double res = 0.0;
    for (std::size_t i = 0; i < 30; ++i) res = std::max(res, std::abs(av[i] - e.lambda * e.vec[i]));
    CHECK(res < 1e-10);
    // Independent check: A - lambda + eps is positive definite, A - lambda - eps is not.
    auto above = a;
    above.shift_diagonal(-e.lambda + 1e-8);
    CHECK(BandCholesky::factor(above).has_value());
    auto below = a;
    below.shift_diagonal(-e.lambda - 1e-8);
    CHECK_FALSE(BandCholesky::factor(below).has_value());
}
