#pragma once

#include <span>
#include <vector>

#include "vortex/band.hpp"
#include "vortex/grid.hpp"
#include "vortex/model.hpp"

namespace vortex {

/// vec is normalized so that int vec^2 r dr = 1 in the grid quadrature.
struct EigenPair {
    double lambda = 0.0;
    std::vector<double> vec;
    /// |lambda| < 1e-9; multiplicity is not resolved.
    bool degenerate = false;
    int iterations = 0;
    /// Quadrature norm of (A - lambda) vec.
    double residual = 0.0;
};

/// Lowest eigenpair of -lap_r - V with Dirichlet at r_max and the given
/// condition at the origin. The eigenfunction is made positive.
/// Throws NonConvergence (without a profile) if the iteration stalls.
EigenPair ground_state(const RadialGrid& grid, std::span<const double> potential,
                       OriginBC bc = OriginBC::neumann0);

/// <t, (-lap_r - V) t> / <t, t> with the same discretization as ground_state.
/// t must vanish at r_max.
double rayleigh_quotient(const RadialGrid& grid, std::span<const double> potential, std::span<const double> t);

struct Threshold {
    double g_star = 0.0;
    double lambda0 = 0.0;
    EigenPair ground;
};

/// g* = -lambda0 / kappa^2 for V = kappa^2 (1 - f~^2), and g* = -lambda0 with
/// V = 1 - f~^2 in the limit system. Uses the cached normal core on grid.
Threshold threshold_g(const Kappa& kappa, int d, GridPtr grid);

struct HessianEigenPair {
    double lambda = 0.0;
    /// Normalized so that the quadrature norm of (u, v, w) is 1.
    TangentDirection vec;
    bool degenerate = false;
    int iterations = 0;
};

/// Smallest eigenvalue of the second variation at p in the quadrature
/// inner product, clamped components removed.
HessianEigenPair hessian_min_eig(const ModelParams& params, const Profile& p);

/// Lowest eigenpair of a symmetric banded matrix: Cholesky-inertia bisection,
/// three fixed-shift inverse iteration steps and Rayleigh quotient iteration.
/// Returned vector has unit Euclidean norm.
struct BandEigen {
    double lambda = 0.0;
    std::vector<double> vec;
    int iterations = 0;
};
BandEigen lowest_eigenpair(const SymBandMatrix& b);

}  // namespace vortex
