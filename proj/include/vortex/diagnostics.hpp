#pragma once

#include <span>
#include <string>
#include <vector>

#include "vortex/grid.hpp"
#include "vortex/model.hpp"
#include "vortex/solver.hpp"

namespace vortex {

struct Check {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct DiagnosticsReport {
    std::vector<Check> checks;
    bool overall = true;

    /// Records a check that passes when measured < threshold.
    void below(const std::string& name, double measured, double threshold);
    /// Records a check that passes when measured > threshold.
    void above(const std::string& name, double measured, double threshold);
    const Check* find(const std::string& name) const;
};

/// Bounds and monotonicity of a converged profile at interior nodes:
/// 0 < f < 1, 0 <= m < 1, f^2 + m^2 < 1, f' > 0, m' < 0 where m > 0, and for
/// finite kappa 0 < S < d, S' > 0, plus the m dichotomy (max m < 1e-8 or m > 0
/// at every interior node). Every inequality gets the given slack. Negative d
/// is handled through reflect().
DiagnosticsReport check_admissible(const ModelParams& params, const Profile& p, double slack = 1e-8);

enum class TailField { f_deficit, m, s_deficit };

struct DecayFit {
    enum class Model { exponential, inverse_square };
    Model model = Model::exponential;
    /// exponential: field ~ C0 exp(-sigma r)
    double C0 = 0.0, sigma = 0.0;
    /// inverse_square: field ~ coeff / r^2 + second / r^4
    double coeff = 0.0, second = 0.0;
    double r_lo = 0.0, r_hi = 0.0;
    double r2 = 0.0;
    int points = 0;
};

/// Least-squares tail fit on [0.5 r_max, 0.9 r_max]: log-linear for m and
/// for 1 - f, d - S at finite kappa; a / r^2 + b / r^4 for 1 - f in the limit
/// system. Samples below 1e-14 are skipped; throws DegenerateTail when fewer
/// than three remain.
DecayFit decay_fit(const ModelParams& params, const Profile& p, TailField field);

/// sqrt(int (u')^2 + u^2 + u^2/r^2 r dr), origin node left out of the last term.
double x_norm(const RadialGrid& grid, std::span<const double> u);
/// sqrt(int (u')^2 + u^2 r dr).
double h_norm(const RadialGrid& grid, std::span<const double> u);

/// true when values strictly decrease (each step by more than slack).
bool strictly_decreasing(std::span<const double> values, double slack = 1e-12);
bool strictly_increasing(std::span<const double> values, double slack = 1e-12);

struct LimitRow {
    double kappa = 0.0;
    double sup_f = 0.0, sup_m = 0.0, sup_S_over_r = 0.0;
    double g_star = 0.0, g_star_gap = 0.0;
    double m0 = 0.0;
};

struct LimitTable {
    double g = 0.0;
    double g_star_inf = 0.0;
    double window = 5.0;
    std::vector<LimitRow> rows;
    bool f_decreasing = false, m_decreasing = false, S_decreasing = false, g_star_decreasing = false;
    bool all_monotone() const { return f_decreasing && m_decreasing && S_decreasing && g_star_decreasing; }
};

struct LimitOptions {
    std::size_t n = 4001;
    double r_max = 40.0;
    /// Rescaled radius window for the sup norms.
    double window = 5.0;
};

/// Solves at each finite kappa (worker threads) and compares the rescaled
/// profiles f(rho / kappa), m(rho / kappa), S(rho / kappa) / rho with the
/// limit-system solution on inf_grid for rho <= window.
LimitTable limit_check(std::span<const double> kappas, int d, double g, GridPtr inf_grid, const LimitOptions& opts = {});

struct ScanRow {
    double g = 0.0, energy = 0.0, m0 = 0.0, max_f_core = 0.0;
};

struct ScanTable {
    std::vector<ScanRow> rows;
    bool energy_decreasing = false, m0_increasing = false, f_core_decreasing = false;
};

/// Minimizers along a decreasing list of g, each warm-started from the
/// previous one. max_f_core is max f over r <= 5.
ScanTable g_to_zero_scan(const Kappa& kappa, int d, GridPtr grid, std::span<const double> g_list,
                         const SolveOptions& opts = {});

struct ScalingFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
    std::vector<double> energies;
};

/// Least squares of the minimizer energy against ln kappa, one default grid
/// per kappa. Throws InsufficientPoints for fewer than two kappas.
ScalingFit energy_scaling(std::span<const double> kappas, int d, double g, std::size_t n = 4001,
                          double r_max = 40.0);

/// y = a + b x least squares; returns {a, b, r2}.
struct LineFit {
    double intercept = 0.0, slope = 0.0, r2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Piecewise-linear interpolation of samples on grid at radius x (clamped to
/// the grid range).
double interpolate(const RadialGrid& grid, std::span<const double> values, double x);

}  // namespace vortex
