#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace vortex {

/// Node placement on [0, R_max]. Graded grids use r = R sinh(s x) / sinh(s)
/// on uniform x in [0, 1], which clusters nodes near the origin where
/// f ~ r^d changes fastest; strength s = 0 is the uniform grid.
struct Grading {
    enum class Kind { uniform, graded };
    Kind kind = Kind::uniform;
    double strength = 0.0;

    static Grading uniform() { return {}; }
    static Grading graded(double strength) { return {Kind::graded, strength}; }

    std::string to_string() const;
    static Grading parse(const std::string& text);
};

enum class OriginBC { dirichlet0, neumann0 };

/// Truncated radial mesh on [0, R_max] with control-volume quadrature for
/// the measure r dr.
///
/// Node i owns the annulus between the neighbouring cell midpoints, so
/// w_i = (c_i^2 - c_{i-1}^2) / 2 with c_{-1} = 0 and c_{n-1} = R_max. The
/// weights are positive, sum to R_max^2 / 2, and reduce to the trapezoid
/// weight r_i h at interior nodes of a uniform grid. The origin node keeps a
/// positive weight, which the Neumann rows of m-like fields need.
///
/// Immutable after construction.
class RadialGrid {
public:
    /// Builds from explicit node positions (used when reading profile files).
    static RadialGrid from_nodes(std::vector<double> r, Grading grading);

    std::size_t size() const { return r_.size(); }
    std::size_t cells() const { return r_.size() - 1; }
    double r_max() const { return r_.back(); }
    const Grading& grading() const { return grading_; }

    std::span<const double> r() const { return r_; }
    std::span<const double> weights() const { return w_; }
    /// Cell widths h_i = r_{i+1} - r_i.
    std::span<const double> widths() const { return h_; }
    /// Cell midpoints.
    std::span<const double> mids() const { return mid_; }
    /// mid_i / h_i: exact cell integral of (u')^2 r dr for linear u.
    std::span<const double> stiffness() const { return stiff_; }
    /// 1 / (h_i mid_i): midpoint rule for (S')^2 / r dr.
    std::span<const double> stiffness_inv_r() const { return stiff_inv_r_; }
    /// 1 / r_i^2 with the origin entry set to zero (the origin node does not
    /// contribute to u^2 / r^2 integrals; u(0) = 0 there).
    std::span<const double> inv_r2() const { return inv_r2_; }

    double min_width() const;

private:
    RadialGrid() = default;
    void finalize();

    std::vector<double> r_, w_, h_, mid_, stiff_, stiff_inv_r_, inv_r2_;
    Grading grading_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Throws std::invalid_argument for n < 16 or r_max <= 0.
GridPtr build_grid(std::size_t n, double r_max, Grading grading = Grading::uniform());

/// Grading strength that makes the smallest cell about 1/kappa of the
/// uniform spacing, so the vortex core (width ~ 1/kappa) gets the same
/// relative resolution for every kappa. Returns 0 for kappa <= 1.
double core_grading_strength(double kappa);

/// sum_i w_i u_i. Throws std::invalid_argument on length mismatch.
double integrate(const RadialGrid& grid, std::span<const double> samples);

/// Discrete -u'' - u'/r in conservative form. Interior rows are second order;
/// the origin row is -4 (u_1 - u_0) / h^2 for neumann0 and zero for
/// dirichlet0 (the value is clamped there). The last row is always zero
/// because every field is clamped at R_max.
std::vector<double> apply_radial_laplacian(const RadialGrid& grid, std::span<const double> samples,
                                           OriginBC origin_bc);

}  // namespace vortex
