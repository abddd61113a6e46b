#include "vortex/kernels.hpp"

namespace vortex::kernels {
namespace {

double weighted_sum(Span w, Span a) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i];
    return s;
}

double weighted_dot(Span w, Span a, Span b) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

double cell_energy(Span coef, Span u) {
    double s = 0.0;
    for (std::size_t i = 0; i < coef.size(); ++i) {
        const double du = u[i + 1] - u[i];
        s += coef[i] * du * du;
    }
    return s;
}

void stiffness_accumulate(Span coef, Span u, MutSpan out) {
    const std::size_t cells = coef.size();
    for (std::size_t i = 0; i < cells; ++i) {
        const double flux = coef[i] * (u[i + 1] - u[i]);
        out[i] -= flux;
        out[i + 1] += flux;
    }
}

double potential_energy(Span w, Span f, Span m) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double t = 1.0 - f[i] * f[i] - m[i] * m[i];
        s += w[i] * t * t;
    }
    return s;
}

void potential_gradient(Span w, Span f, Span m, double scale, MutSpan out_f, MutSpan out_m) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double t = -scale * w[i] * (1.0 - f[i] * f[i] - m[i] * m[i]);
        out_f[i] += t * f[i];
        out_m[i] += t * m[i];
    }
}

void axpy(double alpha, Span x, MutSpan y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void flow_update(double dt, Span w, Span x, MutSpan y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] -= dt * x[i] / w[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{
        "scalar",     weighted_sum,       weighted_dot, cell_energy, stiffness_accumulate,
        potential_energy, potential_gradient, axpy,     flow_update,
    };
    return table;
}

}  // namespace vortex::kernels
