#pragma once

// Data-parallel inner loops shared by the grid, the discrete energy and the
// gradient flow. Every kernel has a scalar reference implementation; vector
// variants are selected once at runtime and must agree with the reference to
// rounding (see tests/test_kernels.cpp).

#include <cstddef>
#include <span>
#include <string_view>

namespace vortex::kernels {

using Span = std::span<const double>;
using MutSpan = std::span<double>;

struct KernelTable {
    std::string_view name;

    // sum_i w_i a_i
    double (*weighted_sum)(Span w, Span a);
    // sum_i w_i a_i b_i
    double (*weighted_dot)(Span w, Span a, Span b);
    // sum_{i < n-1} coef_i (u_{i+1} - u_i)^2, coef has n-1 entries
    double (*cell_energy)(Span coef, Span u);
    // out_i += coef_{i-1} (u_i - u_{i-1}) - coef_i (u_{i+1} - u_i), missing
    // neighbours contribute nothing. This is d/du_i of cell_energy / 2.
    void (*stiffness_accumulate)(Span coef, Span u, MutSpan out);
    // sum_i w_i (1 - f_i^2 - m_i^2)^2
    double (*potential_energy)(Span w, Span f, Span m);
    // s = 1 - f^2 - m^2;  out_f += -scale w s f;  out_m += -scale w s m
    void (*potential_gradient)(Span w, Span f, Span m, double scale, MutSpan out_f, MutSpan out_m);
    // y += alpha x
    void (*axpy)(double alpha, Span x, MutSpan y);
    // y_i -= dt x_i / w_i   (explicit gradient-flow update in the quadrature metric)
    void (*flow_update)(double dt, Span w, Span x, MutSpan y);
};

const KernelTable& scalar_kernels();

// nullptr when the build or the host CPU lacks AVX2+FMA.
const KernelTable* avx2_kernels();

// Table used by the library. Picks AVX2 when available unless the
// environment variable VORTEX_KERNELS=scalar is set.
const KernelTable& active();

}  // namespace vortex::kernels
