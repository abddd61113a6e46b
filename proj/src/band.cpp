#include "vortex/band.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cassert>
#include <cmath>

namespace vortex {

void SymBandMatrix::add(std::size_t i, std::size_t j, double value) {
    if (i < j) std::swap(i, j);
    assert(i - j <= kd_);
    ab_[j * (kd_ + 1) + (i - j)] += value;
}

double SymBandMatrix::at(std::size_t i, std::size_t j) const {
    if (i < j) std::swap(i, j);
    if (i - j > kd_) return 0.0;
    return ab_[j * (kd_ + 1) + (i - j)];
}

void SymBandMatrix::pin(std::size_t i, double diagonal) {
    const std::size_t lo = i >= kd_ ? i - kd_ : 0;
    const std::size_t hi = std::min(n_ - 1, i + kd_);
    for (std::size_t j = lo; j <= hi; ++j) {
        const std::size_t a = std::max(i, j), b = std::min(i, j);
        ab_[b * (kd_ + 1) + (a - b)] = 0.0;
    }
    ab_[i * (kd_ + 1)] = diagonal;
}

void SymBandMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
        const double* col = &ab_[j * (kd_ + 1)];
        y[j] += col[0] * x[j];
        const std::size_t top = std::min(kd_, n_ - 1 - j);
        for (std::size_t k = 1; k <= top; ++k) {
            y[j + k] += col[k] * x[j];
            y[j] += col[k] * x[j + k];
        }
    }
}

double SymBandMatrix::quadratic(std::span<const double> x) const {
    std::vector<double> y(n_);
    multiply(x, y);
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += x[i] * y[i];
    return s;
}

void SymBandMatrix::shift_diagonal(double shift, std::span<const double> metric) {
    for (std::size_t i = 0; i < n_; ++i) ab_[i * (kd_ + 1)] += shift * metric[i];
}

void SymBandMatrix::shift_diagonal(double shift) {
    for (std::size_t i = 0; i < n_; ++i) ab_[i * (kd_ + 1)] += shift;
}

namespace {
std::vector<double> offdiag_abs_sums(const SymBandMatrix& a) {
    const std::size_t n = a.size(), kd = a.bandwidth();
    std::vector<double> s(n, 0.0);
    const auto& ab = a.data();
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t top = std::min(kd, n - 1 - j);
        for (std::size_t k = 1; k <= top; ++k) {
            const double v = std::abs(ab[j * (kd + 1) + k]);
            s[j] += v;
            s[j + k] += v;
        }
    }
    return s;
}
}  // namespace

double SymBandMatrix::gershgorin_lower() const {
    const auto s = offdiag_abs_sums(*this);
    double lo = INFINITY;
    for (std::size_t i = 0; i < n_; ++i) lo = std::min(lo, ab_[i * (kd_ + 1)] - s[i]);
    return lo;
}

double SymBandMatrix::gershgorin_upper() const {
    const auto s = offdiag_abs_sums(*this);
    double hi = -INFINITY;
    for (std::size_t i = 0; i < n_; ++i) hi = std::max(hi, ab_[i * (kd_ + 1)] + s[i]);
    return hi;
}

std::optional<BandCholesky> BandCholesky::factor(const SymBandMatrix& a) {
    BandCholesky c;
    c.n_ = a.size();
    c.kd_ = a.bandwidth();
    c.ab_ = a.data();
    const lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(c.n_),
                                           static_cast<lapack_int>(c.kd_), c.ab_.data(),
                                           static_cast<lapack_int>(c.kd_ + 1));
    if (info != 0) return std::nullopt;
    return c;
}

void BandCholesky::solve_in_place(std::span<double> rhs) const {
    LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'L', static_cast<lapack_int>(n_), static_cast<lapack_int>(kd_), 1,
                   ab_.data(), static_cast<lapack_int>(kd_ + 1), rhs.data(), static_cast<lapack_int>(n_));
}

bool solve_band_lu(const SymBandMatrix& a, std::span<double> rhs) {
    const std::size_t n = a.size(), kd = a.bandwidth();
    // general band storage with kl extra rows for fill-in: ldab = 2 kl + ku + 1
    const std::size_t ldab = 3 * kd + 1;
    std::vector<double> gb(ldab * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t lo = j >= kd ? j - kd : 0;
        const std::size_t hi = std::min(n - 1, j + kd);
        for (std::size_t i = lo; i <= hi; ++i) gb[j * ldab + (2 * kd + i - j)] = a.at(i, j);
    }
    std::vector<lapack_int> piv(n);
    const lapack_int info =
        LAPACKE_dgbsv(LAPACK_COL_MAJOR, static_cast<lapack_int>(n), static_cast<lapack_int>(kd),
                      static_cast<lapack_int>(kd), 1, gb.data(), static_cast<lapack_int>(ldab), piv.data(),
                      rhs.data(), static_cast<lapack_int>(n));
    return info == 0;
}

}  // namespace vortex
