#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vortex/grid.hpp"
#include "vortex/model.hpp"
#include "vortex/solver.hpp"

namespace vortex {

struct BranchPoint {
    double g = 0.0;
    double m0 = 0.0;
    /// Referenced energy (limit system) or plain energy (finite kappa).
    double energy = 0.0;
    double lambda_min = 0.0;
    double pohozaev_rel = 0.0;
    int newton_iters = 0;
};

/// Points ordered by strictly decreasing g. The first point is the
/// bifurcation anchor (normal core at g*, m0 = 0).
struct Branch {
    Kappa kappa = Kappa::infinite();
    int d = 1;
    double g_star = 0.0;
    std::vector<BranchPoint> points;
    /// false when a point failed its gates twice; points holds the prefix.
    bool complete = true;
    std::string abort_reason;
};

struct BranchOptions {
    SolveOptions solve;
    /// Amplitude of the eigenfunction perturbation for the first AF seed.
    double first_amplitude = 0.1;
    /// g* - g for the first solved point, as a fraction of g*.
    double first_offset = 1e-3;
    double pohozaev_gate = 1e-3;
    double lambda_gate = -1e-8;
};

/// Natural continuation in g from just below g* down to g_min on a
/// geometric schedule of g* - g, each solve warm-started from the previous
/// point. Every accepted point passes the residual, Pohozaev, admissibility
/// and stability gates; a failing point is retried at half the step, after
/// which the branch stops.
Branch trace_branch(const Kappa& kappa, int d, GridPtr grid, double g_min, int steps, const BranchOptions& opts = {});

struct TransitionFit {
    double exponent = 0.0;
    double log_prefactor = 0.0;
    double r2 = 0.0;
    int points = 0;
};

/// Least-squares slope of log m0 against log(g* - g) over points with
/// 0.8 g* <= g < g* and m0 > 0. Throws InsufficientPoints below 10 points.
TransitionFit transition_order(const Branch& branch);

struct BifurcationDirection {
    double gamma2 = 0.0;
    /// int f~ u* w^2 r dr; negative whenever the (f, S) block is positive definite.
    double f_u_w2 = 0.0;
    double w4 = 0.0;
    double w2 = 0.0;
    double g_star = 0.0;
    std::vector<double> u_star;
    /// The constraint (u*, v*, w*) perp (0, 0, w) is taken in the grid
    /// quadrature inner product, where it holds by construction (w* = 0).
    std::string orthogonality = "quadrature";
};

/// Second derivative of g along the bifurcating curve at g*:
///   gamma'' = -2 int (f~ u* w^2 + w^4) / int w^2
/// where (u*, v*) solves the (f, S) block of the linearization with right
/// side -(2 kappa^2 f~ w^2, 0). Negative means the branch leaves toward
/// g < g*. Requires finite kappa with kappa^2 >= 2 d^2; throws
/// SingularSystem if the block is not positive definite.
BifurcationDirection bifurcation_direction(const Kappa& kappa, int d, GridPtr grid);

struct UniquenessReport {
    double max_pairwise_dist = 0.0;
    /// Largest sup m over the converged starts.
    double max_m = 0.0;
    int converged = 0;
    std::vector<std::string> failures;
    std::vector<Profile> solutions;
};

/// Solves from n_starts randomized seeds (amplitude and width of the m bump,
/// small f distortion) and reports the largest pairwise sup distance.
UniquenessReport uniqueness_probe(const Kappa& kappa, int d, double g, GridPtr grid, int n_starts,
                                  std::uint64_t rng_seed = 12345, const SolveOptions& opts = {});

/// max over nodes and fields of |a - b|.
double sup_distance(const Profile& a, const Profile& b);

}  // namespace vortex
