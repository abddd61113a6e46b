#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vortex/errors.hpp"
#include "vortex/grid.hpp"
#include "vortex/model.hpp"

namespace vortex {

/// Starting point for solve().
struct Seed {
    enum class Kind { normal_core, perturbed, trial, custom };
    Kind kind = Kind::normal_core;
    /// perturbed: sup of the added m, shaped like the threshold ground state.
    double amplitude = 0.1;
    /// trial: cutoff radius of the log-cutoff trial field.
    double rho = 8.0;
    std::shared_ptr<const Profile> profile;

    static Seed normal_core() { return {}; }
    static Seed perturbed(double amplitude) { return {Kind::perturbed, amplitude, 8.0, nullptr}; }
    static Seed trial(double rho) { return {Kind::trial, 0.1, rho, nullptr}; }
    static Seed custom(Profile p) { return {Kind::custom, 0.1, 8.0, std::make_shared<const Profile>(std::move(p))}; }

    std::string to_string() const;
};

struct SolveOptions {
    double tol_residual = 1e-10;
    int max_newton = 50;
    int max_flow_steps = 20000;
    /// 0 picks min(h_min^2 / (4 max(1, kappa^2)), 0.9 / spectral bound).
    double flow_dt = 0.0;
    Seed seed = Seed::normal_core();

    void validate() const;
};

struct SolveStats {
    int newton_iters = 0;
    int flow_steps = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
    std::string seed;
    /// Energies of the competing candidates when solve() had to choose
    /// between the seeded run and the normal core (NaN when not computed).
    double seeded_energy = NAN;
    double normal_core_energy = NAN;
    bool chose_normal_core = false;
};

struct Solution {
    Profile profile;
    SolveStats stats;
};

/// Grid used when the caller does not supply one: n nodes on [0, r_max],
/// uniform for the limit system and for kappa <= 1, otherwise graded so the
/// core of width ~1/kappa keeps the same resolution.
GridPtr default_grid(const Kappa& kappa, std::size_t n = 4001, double r_max = 40.0);

/// Domain radius that leaves about e^-10 of the m tail at r_max: m decays
/// like exp(-sqrt(g) r) in the limit system and exp(-kappa sqrt(g) r) at
/// finite kappa. Never below 40.
double recommended_r_max(const Kappa& kappa, double g_min);

/// Normal core: m pinned to 0, Newton on the remaining (f, S) block.
Solution solve_normal_core(const ModelParams& params, GridPtr grid, const SolveOptions& opts = {});

/// Normal core shared across callers, computed once per (grid, kappa, |d|).
/// g does not enter the normal-core equations.
std::shared_ptr<const Profile> cached_normal_core(const Kappa& kappa, int d, GridPtr grid);

/// Energy with the limit-system winding term referenced to the cached normal
/// core (identical to energy() for finite kappa).
EnergyBreakdown referenced_energy(const ModelParams& params, const Profile& p);

/// Critical point from the requested seed. When the seed carries an m
/// perturbation, the normal core is also considered and the lower-energy
/// candidate is returned; both energies go to stats.
Solution solve(const ModelParams& params, GridPtr grid, const SolveOptions& opts = {});

/// Explicit Euler on the energy in the quadrature metric (S moves in the
/// metric of S/r). Throws StabilityViolation if the energy rises by more than
/// 1e-12 max(1, |E|) in a step.
Profile gradient_flow(const ModelParams& params, const Profile& start, int steps, double dt);

/// Largest stable explicit step for the flow at p.
double default_flow_dt(const ModelParams& params, const Profile& p);

/// Log-cutoff trial field: u = 1 on [0, rho], ln(rho^2 / r) / ln(rho) on
/// [rho, rho^2], 0 beyond; f = cos(u pi/2), m = sin(u pi/2), and S a smooth
/// step from 0 at rho/2 to d at rho. Requires 2 <= rho and rho^2 <= r_max.
Profile trial_profile(const ModelParams& params, GridPtr grid, double rho);

/// Upper bound for the trial energy: C / rho^2 + pi^2 / (4 ln rho) + kappa^2 g rho^4 / 2
/// with C = trial_step_constant() d^2 (kappa^2 replaced by 1 in the limit system).
double trial_energy_bound(const ModelParams& params, double rho);

/// 72 int_0^1 t^2 (1-t)^2 / (1+t) dt, the magnetic cost of the smoothstep.
double trial_step_constant();

}  // namespace vortex
