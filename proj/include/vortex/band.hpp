#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace vortex {

/// Symmetric banded matrix stored as its lower band (LAPACK 'L' layout,
/// column-major, (kd+1) x n).
class SymBandMatrix {
public:
    SymBandMatrix() = default;
    SymBandMatrix(std::size_t n, std::size_t kd) : n_(n), kd_(kd), ab_((kd + 1) * n, 0.0) {}

    std::size_t size() const { return n_; }
    std::size_t bandwidth() const { return kd_; }

    /// Adds to entry (i, j) and, implicitly, (j, i). |i - j| must be <= kd.
    void add(std::size_t i, std::size_t j, double value);
    double at(std::size_t i, std::size_t j) const;
    void set_diagonal(std::size_t i, double value) { ab_[i * (kd_ + 1)] = value; }

    /// Replaces row and column i by the identity row (Dirichlet pin).
    void pin(std::size_t i, double diagonal = 1.0);

    void multiply(std::span<const double> x, std::span<double> y) const;
    double quadratic(std::span<const double> x) const;

    /// Adds shift * diag(metric) to the diagonal.
    void shift_diagonal(double shift, std::span<const double> metric);
    void shift_diagonal(double shift);

    /// Gershgorin bounds on the spectrum.
    double gershgorin_lower() const;
    double gershgorin_upper() const;

    const std::vector<double>& data() const { return ab_; }

private:
    std::size_t n_ = 0, kd_ = 0;
    std::vector<double> ab_;
};

/// Banded Cholesky factor; empty when the matrix is not positive definite.
class BandCholesky {
public:
    static std::optional<BandCholesky> factor(const SymBandMatrix& a);
    void solve_in_place(std::span<double> rhs) const;

private:
    std::size_t n_ = 0, kd_ = 0;
    std::vector<double> ab_;
};

/// Solves a (possibly indefinite) symmetric banded system with partial
/// pivoting. Returns false when the matrix is exactly singular.
bool solve_band_lu(const SymBandMatrix& a, std::span<double> rhs);

}  // namespace vortex
