#include "vortex/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vortex/errors.hpp"
#include "vortex/solver.hpp"

namespace vortex {

namespace {

bool positive_definite_below(const SymBandMatrix& b, double sigma) {
    SymBandMatrix s = b;
    s.shift_diagonal(-sigma);
    return BandCholesky::factor(s).has_value();
}

double norm2(const std::vector<double>& x) {
    return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
}

void normalize(std::vector<double>& x) {
    const double nx = norm2(x);
    for (double& v : x) v /= nx;
}

double eigen_defect(const SymBandMatrix& b, const std::vector<double>& y, double lambda) {
    std::vector<double> by(y.size());
    b.multiply(y, by);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (by[i] - lambda * y[i]) * (by[i] - lambda * y[i]);
    return std::sqrt(s);
}

}  // namespace

BandEigen lowest_eigenpair(const SymBandMatrix& b) {
    const std::size_t n = b.size();
    if (n == 0) throw std::invalid_argument("lowest_eigenpair: empty matrix");
    double lo = b.gershgorin_lower(), hi = b.gershgorin_upper();
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});

    // Cholesky succeeds on B - sigma I exactly when sigma < lambda_min
    for (int it = 0; it < 200 && hi - lo > 4e-16 * scale; ++it) {
        const double mid = 0.5 * (lo + hi);
        (positive_definite_below(b, mid) ? lo : hi) = mid;
    }

    BandEigen out;
    // fixed-shift inverse iteration just below the bracket
    const double sigma0 = lo - 4.0 * (hi - lo) - 1e-14 * scale;
    SymBandMatrix shifted = b;
    shifted.shift_diagonal(-sigma0);
    const auto chol = BandCholesky::factor(shifted);
    if (!chol) throw SingularSystem("lowest_eigenpair: shifted matrix not positive definite");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = 1.0 + 0.01 * std::sin(0.37 * static_cast<double>(i));
    normalize(y);
    for (int k = 0; k < 3; ++k) {
        chol->solve_in_place(y);
        normalize(y);
        ++out.iterations;
    }

    // Rayleigh quotient iteration
    std::vector<double> by(n);
    b.multiply(y, by);
    double lambda = std::inner_product(y.begin(), y.end(), by.begin(), 0.0);
    double defect = eigen_defect(b, y, lambda);
    for (int k = 0; k < 8 && defect > 1e-14 * scale; ++k) {
        SymBandMatrix s = b;
        s.shift_diagonal(-lambda);
        std::vector<double> z = y;
        if (!solve_band_lu(s, z)) break;  // lambda is an eigenvalue to machine precision
        normalize(z);
        b.multiply(z, by);
        const double lz = std::inner_product(z.begin(), z.end(), by.begin(), 0.0);
        const double dz = eigen_defect(b, z, lz);
        ++out.iterations;
        if (!(dz < defect)) break;
        y.swap(z);
        lambda = lz;
        defect = dz;
    }

    // inertia check: nothing may lie below the converged value
    if (!positive_definite_below(b, lambda - 1e-6 * std::max(1.0, std::abs(lambda)) - 10.0 * defect)) {
        throw NonConvergence("Rayleigh quotient iteration left the lowest eigenvalue", Profile{}, {defect});
    }
    out.lambda = lambda;
    out.vec = std::move(y);
    return out;
}

EigenPair ground_state(const RadialGrid& grid, std::span<const double> potential, OriginBC bc) {
    const std::size_t n = grid.size();
    if (potential.size() != n) throw std::invalid_argument("ground_state: potential length does not match grid");
    for (double v : potential)
        if (!std::isfinite(v)) throw std::invalid_argument("ground_state: potential must be finite");
    const std::size_t first = bc == OriginBC::dirichlet0 ? 1 : 0;
    const std::size_t last = n - 2;  // Dirichlet at r_max
    const std::size_t N = last - first + 1;
    const auto w = grid.weights();
    const auto stiff = grid.stiffness();

    std::vector<double> s(N);
    for (std::size_t k = 0; k < N; ++k) s[k] = 1.0 / std::sqrt(w[first + k]);
    SymBandMatrix B(N, 1);
    for (std::size_t c = 0; c + 1 < n; ++c) {
        const double a = stiff[c];
        const bool in0 = c >= first && c <= last, in1 = c + 1 >= first && c + 1 <= last;
        if (in0) B.add(c - first, c - first, a * s[c - first] * s[c - first]);
        if (in1) B.add(c + 1 - first, c + 1 - first, a * s[c + 1 - first] * s[c + 1 - first]);
        if (in0 && in1) B.add(c - first, c + 1 - first, -a * s[c - first] * s[c + 1 - first]);
    }
    for (std::size_t k = 0; k < N; ++k) B.add(k, k, -potential[first + k]);

    BandEigen be = lowest_eigenpair(B);
    EigenPair ep;
    ep.lambda = be.lambda;
    ep.iterations = be.iterations;
    ep.degenerate = std::abs(be.lambda) < 1e-9;
    ep.vec.assign(n, 0.0);
    double sum = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        ep.vec[first + k] = be.vec[k] * s[k];
        sum += ep.vec[first + k] * w[first + k];
    }
    if (sum < 0.0)
        for (double& v : ep.vec) v = -v;

    const double norm = std::sqrt(integrate(grid, [&] {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) sq[i] = ep.vec[i] * ep.vec[i];
        return sq;
    }()));
    for (double& v : ep.vec) v /= norm;

    // (-lap - V - lambda) vec in the quadrature norm, over the free rows
    const auto lap = apply_radial_laplacian(grid, ep.vec, bc);
    double res2 = 0.0;
    for (std::size_t i = first; i <= last; ++i) {
        const double ri = lap[i] - potential[i] * ep.vec[i] - ep.lambda * ep.vec[i];
        res2 += w[i] * ri * ri;
    }
    ep.residual = std::sqrt(res2);
    return ep;
}

double rayleigh_quotient(const RadialGrid& grid, std::span<const double> potential, std::span<const double> t) {
    const std::size_t n = grid.size();
    if (potential.size() != n || t.size() != n) throw std::invalid_argument("rayleigh_quotient: length mismatch");
    const auto w = grid.weights();
    const auto stiff = grid.stiffness();
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c + 1 < n; ++c) num += stiff[c] * (t[c + 1] - t[c]) * (t[c + 1] - t[c]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        num -= w[i] * potential[i] * t[i] * t[i];
        den += w[i] * t[i] * t[i];
    }
    if (!(den > 0.0)) throw std::invalid_argument("rayleigh_quotient: zero test function");
    return num / den;
}

Threshold threshold_g(const Kappa& kappa, int d, GridPtr grid) {
    const auto core = cached_normal_core(kappa, d, grid);
    const double k2 = kappa.potential_scale();
    std::vector<double> V(grid->size());
    for (std::size_t i = 0; i < V.size(); ++i) V[i] = k2 * (1.0 - core->f[i] * core->f[i]);
    Threshold t;
    t.ground = ground_state(*grid, V, OriginBC::neumann0);
    t.lambda0 = t.ground.lambda;
    t.g_star = -t.lambda0 / k2;
    return t;
}

HessianEigenPair hessian_min_eig(const ModelParams& params, const Profile& p) {
    const SymBandMatrix H = energy_hessian(params, p);
    const RadialGrid& grid = *p.grid;
    const std::size_t n = grid.size(), nf = params.field_count();
    const auto w = grid.weights();
    const auto r = grid.r();
    const std::size_t N = H.size(), kd = H.bandwidth();

    // B = W^{-1/2} D H D W^{-1/2}, D = r on the S entries
    std::vector<double> s(N);
    for (std::size_t i = 0; i < n; ++i) {
        const double iw = 1.0 / std::sqrt(w[i]);
        s[i * nf] = iw;
        if (nf == 3) s[i * nf + 1] = r[i] * iw;
        s[i * nf + nf - 1] = iw;
    }
    SymBandMatrix B(N, kd);
    for (std::size_t j = 0; j < N; ++j) {
        for (std::size_t i = j; i <= std::min(N - 1, j + kd); ++i) B.add(i, j, H.at(i, j) * s[i] * s[j]);
    }
    const auto clamped = clamped_dofs(params, n);
    const double big = 10.0 * std::max({1.0, std::abs(B.gershgorin_lower()), std::abs(B.gershgorin_upper())});
    for (std::size_t k : clamped) B.pin(k, big);

    const BandEigen be = lowest_eigenpair(B);
    HessianEigenPair out;
    out.lambda = be.lambda;
    out.iterations = be.iterations;
    out.degenerate = std::abs(be.lambda) < 1e-9;
    out.vec = TangentDirection::zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double iw = 1.0 / std::sqrt(w[i]);
        out.vec.u[i] = be.vec[i * nf] * iw;
        if (nf == 3) out.vec.v[i] = be.vec[i * nf + 1] * iw;
        out.vec.w[i] = be.vec[i * nf + nf - 1] * iw;
    }
    return out;
}

}  // namespace vortex
