#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vortex/band.hpp"
#include "vortex/grid.hpp"

namespace vortex {

/// Ginzburg-Landau parameter; either a positive real or the high-kappa limit.
class Kappa {
public:
    static Kappa infinite() { return Kappa(true, 0.0); }
    /// Throws std::invalid_argument unless value is finite and positive.
    static Kappa finite(double value);
    /// Accepts "inf" / "infinity" (any case) or a positive number.
    static Kappa parse(const std::string& text);

    bool is_infinite() const { return infinite_; }
    /// INFINITY for the limit system.
    double value() const;
    /// Coefficient in front of the potential and mass terms: kappa^2, or 1
    /// for the rescaled limit system.
    double potential_scale() const { return infinite_ ? 1.0 : value_ * value_; }
    std::string to_string() const;

    bool operator==(const Kappa&) const = default;

private:
    Kappa(bool inf, double v) : infinite_(inf), value_(v) {}
    bool infinite_;
    double value_;
};

struct ModelParams {
    Kappa kappa = Kappa::infinite();
    int d = 1;
    double g = 0.1;

    /// Throws std::invalid_argument for d == 0 or g not finite and positive.
    void validate() const;
    bool has_magnetic_field() const { return !kappa.is_infinite(); }
    /// 3 for finite kappa (f, S, m), 2 for the limit system (f, m).
    std::size_t field_count() const { return has_magnetic_field() ? 3 : 2; }
};

/// Sampled radial fields. S is all zeros and ignored when kappa is infinite.
struct Profile {
    GridPtr grid;
    std::vector<double> f, S, m;

    static Profile zeros(GridPtr grid);
    std::size_t size() const { return f.size(); }
    double m0() const { return m.empty() ? 0.0 : m.front(); }
};

/// Perturbation (u, v, w) with S = S0 + r v.
struct TangentDirection {
    std::vector<double> u, v, w;

    static TangentDirection zeros(std::size_t n);
    std::size_t size() const { return u.size(); }
};

/// Each term already carries the overall factor 1/2, so total is their sum.
/// For the limit system magnetic is zero and winding is the referenced term
/// d^2/r^2 (f^2 - f_ref^2), which can be negative.
struct EnergyBreakdown {
    double grad_f = 0, magnetic = 0, grad_m = 0, mass_m = 0, winding = 0, potential = 0, total = 0;
};

/// Discrete energy. Cell terms integrate (u')^2 r exactly for piecewise
/// linear u; pointwise terms use the grid quadrature. For infinite kappa,
/// normal_core_f is the reference f~ subtracted in the winding term; when it
/// is empty the plain d^2 f^2 / r^2 term is used (finite on a truncated
/// domain, handy inside the solver). Throws std::invalid_argument on size
/// mismatches.
EnergyBreakdown energy(const ModelParams& params, const Profile& p, std::span<const double> normal_core_f = {});

/// Strong-form residual, equal to the gradient of the discrete energy in the
/// quadrature inner product:
///   u: -lap f + (d-S)^2 f / r^2 - k2 (1 - f^2 - m^2) f
///   v: (-S'' + S'/r - (d-S) f^2) / r      (the S equation divided by r, so
///      that <residual, dir> is the derivative along S -> S + r v)
///   w: -lap m + k2 g m - k2 (1 - f^2 - m^2) m
/// with k2 = kappa^2 (1 for the limit system). Clamped rows hold the clamp
/// defect instead: f(0), S(0), f(R) - 1, S(R) - d, m(R).
TangentDirection residual(const ModelParams& params, const Profile& p);

/// Sup norm over all fields and rows of a residual.
double sup_norm(const TangentDirection& r);

/// Raw gradient of the discrete energy with respect to the nodal values,
/// interleaved per node as (f, S, m) or (f, m). No clamp handling.
std::vector<double> energy_gradient(const ModelParams& params, const Profile& p);

/// Raw Hessian of the discrete energy in the same interleaved layout.
SymBandMatrix energy_hessian(const ModelParams& params, const Profile& p);

/// Interleaved indices of the clamped values.
std::vector<std::size_t> clamped_dofs(const ModelParams& params, std::size_t n);

/// Interleaved vector <-> profile / direction conversions.
std::vector<double> pack(const ModelParams& params, const Profile& p);
void unpack(const ModelParams& params, std::span<const double> x, Profile& p);

/// Second variation as an operator on tangent directions, symmetric in the
/// quadrature inner product. Clamped components of the input are ignored and
/// those of the output are zero.
class HessianOperator {
public:
    HessianOperator(const ModelParams& params, const Profile& p);

    TangentDirection apply(const TangentDirection& dir) const;
    /// <a, H b> in the quadrature inner product.
    double form(const TangentDirection& a, const TangentDirection& b) const;
    double quadratic(const TangentDirection& dir) const { return form(dir, dir); }

    /// Raw band (value coordinates, clamps not applied).
    const SymBandMatrix& band() const { return band_; }

private:
    std::vector<double> to_values(const TangentDirection& dir) const;

    ModelParams params_;
    GridPtr grid_;
    SymBandMatrix band_;
    std::vector<std::size_t> clamped_;
};

/// Picone-type rewriting of the limit-system second variation around a
/// solution with f, m > 0:
///   int f^2 [(u/f)']^2 + m^2 [(w/m)']^2 + c (f u + m w)^2 r dr.
/// Discretized per cell as f_i f_{i+1} (u_{i+1}/f_{i+1} - u_i/f_i)^2 in its
/// expanded form, which is finite where f or m vanish on a clamped node.
/// Throws std::invalid_argument for finite kappa or if f or m is not
/// positive at an interior node.
double quotient_form(const ModelParams& params, const Profile& p, const TangentDirection& dir, double c = 2.0);

/// The two quotient terms without the c (f u + m w)^2 part, and the
/// coefficient of c. quotient_form = gradient_part + c * coupling.
struct QuotientParts {
    double gradient_part = 0.0;
    double coupling = 0.0;
};
QuotientParts quotient_parts(const ModelParams& params, const Profile& p, const TangentDirection& dir);

struct PohozaevResult {
    double lhs = 0.0, rhs = 0.0, rel_err = 0.0;
};

/// Finite kappa: lhs = g k^2 int m^2 + k^2/2 int (1-f^2-m^2)^2, rhs = int (S'/r)^2 r dr.
/// Limit system: lhs = g int m^2 + 1/2 int (1-f^2-m^2)^2, rhs = d^2 / 2.
PohozaevResult pohozaev_residual(const ModelParams& params, const Profile& p);

/// int (S'/r)^2 r dr on the grid.
double magnetic_integral(const RadialGrid& grid, std::span<const double> S);

/// (d, S) -> (-d, -S). Energy, residual norms and diagnostics are invariant.
std::pair<ModelParams, Profile> reflect(const ModelParams& params, const Profile& p);

}  // namespace vortex
