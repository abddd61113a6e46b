// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma;
// nothing here may run before dispatch.cpp has checked the host CPU.

#include <immintrin.h>

#include "vortex/kernels.hpp"

namespace vortex::kernels {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double weighted_sum(Span w, Span a) {
    const std::size_t n = w.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(&w[i]), _mm256_loadu_pd(&a[i]), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(&w[i + 4]), _mm256_loadu_pd(&a[i + 4]), acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += w[i] * a[i];
    return s;
}

double weighted_dot(Span w, Span a, Span b) {
    const std::size_t n = w.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(&w[i]), _mm256_loadu_pd(&a[i]));
        acc = _mm256_fmadd_pd(wa, _mm256_loadu_pd(&b[i]), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

double cell_energy(Span coef, Span u) {
    const std::size_t cells = coef.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= cells; i += 4) {
        const __m256d du = _mm256_sub_pd(_mm256_loadu_pd(&u[i + 1]), _mm256_loadu_pd(&u[i]));
        acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(&coef[i]), du), du, acc);
    }
    double s = hsum(acc);
    for (; i < cells; ++i) {
        const double du = u[i + 1] - u[i];
        s += coef[i] * du * du;
    }
    return s;
}

void stiffness_accumulate(Span coef, Span u, MutSpan out) {
    const std::size_t cells = coef.size();
    if (cells == 0) return;
    out[0] -= coef[0] * (u[1] - u[0]);
    out[cells] += coef[cells - 1] * (u[cells] - u[cells - 1]);
    // interior node i sees flux_{i-1} - flux_i
    std::size_t i = 1;
    for (; i + 4 <= cells; i += 4) {
        const __m256d um = _mm256_loadu_pd(&u[i - 1]);
        const __m256d u0 = _mm256_loadu_pd(&u[i]);
        const __m256d up = _mm256_loadu_pd(&u[i + 1]);
        const __m256d left = _mm256_mul_pd(_mm256_loadu_pd(&coef[i - 1]), _mm256_sub_pd(u0, um));
        const __m256d right = _mm256_mul_pd(_mm256_loadu_pd(&coef[i]), _mm256_sub_pd(up, u0));
        const __m256d o = _mm256_loadu_pd(&out[i]);
        _mm256_storeu_pd(&out[i], _mm256_add_pd(o, _mm256_sub_pd(left, right)));
    }
    for (; i < cells; ++i) {
        out[i] += coef[i - 1] * (u[i] - u[i - 1]) - coef[i] * (u[i + 1] - u[i]);
    }
}

double potential_energy(Span w, Span f, Span m) {
    const std::size_t n = w.size();
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d fv = _mm256_loadu_pd(&f[i]);
        const __m256d mv = _mm256_loadu_pd(&m[i]);
        const __m256d t = _mm256_fnmadd_pd(mv, mv, _mm256_fnmadd_pd(fv, fv, one));
        acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(&w[i]), t), t, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double t = 1.0 - f[i] * f[i] - m[i] * m[i];
        s += w[i] * t * t;
    }
    return s;
}

void potential_gradient(Span w, Span f, Span m, double scale, MutSpan out_f, MutSpan out_m) {
    const std::size_t n = w.size();
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d neg_scale = _mm256_set1_pd(-scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d fv = _mm256_loadu_pd(&f[i]);
        const __m256d mv = _mm256_loadu_pd(&m[i]);
        const __m256d s = _mm256_fnmadd_pd(mv, mv, _mm256_fnmadd_pd(fv, fv, one));
        const __m256d t = _mm256_mul_pd(_mm256_mul_pd(neg_scale, _mm256_loadu_pd(&w[i])), s);
        _mm256_storeu_pd(&out_f[i], _mm256_fmadd_pd(t, fv, _mm256_loadu_pd(&out_f[i])));
        _mm256_storeu_pd(&out_m[i], _mm256_fmadd_pd(t, mv, _mm256_loadu_pd(&out_m[i])));
    }
    for (; i < n; ++i) {
        const double t = -scale * w[i] * (1.0 - f[i] * f[i] - m[i] * m[i]);
        out_f[i] += t * f[i];
        out_m[i] += t * m[i];
    }
}

void axpy(double alpha, Span x, MutSpan y) {
    const std::size_t n = x.size();
    const __m256d a = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(&y[i], _mm256_fmadd_pd(a, _mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&y[i])));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void flow_update(double dt, Span w, Span x, MutSpan y) {
    const std::size_t n = x.size();
    const __m256d step = _mm256_set1_pd(dt);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d q = _mm256_div_pd(_mm256_loadu_pd(&x[i]), _mm256_loadu_pd(&w[i]));
        _mm256_storeu_pd(&y[i], _mm256_fnmadd_pd(step, q, _mm256_loadu_pd(&y[i])));
    }
    for (; i < n; ++i) y[i] -= dt * x[i] / w[i];
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable table{
        "avx2",           weighted_sum,       weighted_dot, cell_energy, stiffness_accumulate,
        potential_energy, potential_gradient, axpy,         flow_update,
    };
    return table;
}

}  // namespace vortex::kernels
