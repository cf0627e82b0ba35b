// AVX2 + FMA kernel backend. This translation unit is the only one compiled
// with -mavx2 -mfma; it is reached exclusively through the dispatch table
// after a cpuid check, so the binary stays runnable on plain SSE2 machines.

#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "anomgait/kernels.hpp"

namespace anomgait::kernels {

namespace {

inline float hsum8(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_add_ps(lo, _mm_movehl_ps(lo, lo));
    lo = _mm_add_ss(lo, _mm_movehdup_ps(lo));
    return _mm_cvtss_f32(lo);
}

void v_axpy(std::size_t n, float a, const float* x, float* y) {
    const __m256 av = _mm256_set1_ps(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 yv = _mm256_loadu_ps(y + i);
        yv = _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), yv);
        _mm256_storeu_ps(y + i, yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

float v_dot(std::size_t n, const float* x, const float* y) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), acc);
    }
    float r = hsum8(acc);
    for (; i < n; ++i) r += x[i] * y[i];
    return r;
}

float v_sum(std::size_t n, const float* x) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(x + i));
    float r = hsum8(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

float v_abs_diff_sum(std::size_t n, const float* a, const float* b) {
    const __m256 signmask = _mm256_set1_ps(-0.0f);
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
        acc = _mm256_add_ps(acc, _mm256_andnot_ps(signmask, d));
    }
    float r = hsum8(acc);
    for (; i < n; ++i) r += std::abs(a[i] - b[i]);
    return r;
}

float v_sq_diff_sum(std::size_t n, const float* a, const float* b) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
        acc = _mm256_fmadd_ps(d, d, acc);
    }
    float r = hsum8(acc);
    for (; i < n; ++i) {
        const float d = a[i] - b[i];
        r += d * d;
    }
    return r;
}

void v_accumulate(std::size_t n, const float* x, float* acc) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(acc + i,
                         _mm256_add_ps(_mm256_loadu_ps(acc + i), _mm256_loadu_ps(x + i)));
    }
    for (; i < n; ++i) acc[i] += x[i];
}

void v_accumulate_prod(std::size_t n, const float* x, const float* y, float* acc) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 av = _mm256_loadu_ps(acc + i);
        av = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i), av);
        _mm256_storeu_ps(acc + i, av);
    }
    for (; i < n; ++i) acc[i] += x[i] * y[i];
}

void v_accumulate_centered_sq(std::size_t n, const float* x, const float* mean,
                              float* acc) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 d =
            _mm256_sub_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(mean + i));
        _mm256_storeu_ps(acc + i, _mm256_fmadd_ps(d, d, _mm256_loadu_ps(acc + i)));
    }
    for (; i < n; ++i) {
        const float d = x[i] - mean[i];
        acc[i] += d * d;
    }
}

void v_vec_fma(std::size_t n, const float* x, const float* a, const float* b,
               float* out) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 r = _mm256_fmadd_ps(_mm256_loadu_ps(x + i), _mm256_loadu_ps(a + i),
                                         _mm256_loadu_ps(b + i));
        _mm256_storeu_ps(out + i, r);
    }
    for (; i < n; ++i) out[i] = x[i] * a[i] + b[i];
}

void v_leaky_relu(std::size_t n, float slope, const float* x, float* y) {
    const __m256 sv = _mm256_set1_ps(slope);
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 xv = _mm256_loadu_ps(x + i);
        const __m256 neg = _mm256_mul_ps(sv, xv);
        const __m256 mask = _mm256_cmp_ps(xv, zero, _CMP_GT_OQ);
        _mm256_storeu_ps(y + i, _mm256_blendv_ps(neg, xv, mask));
    }
    for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : slope * x[i];
}

void v_leaky_relu_grad(std::size_t n, float slope, const float* x, const float* gy,
                       float* gx) {
    const __m256 sv = _mm256_set1_ps(slope);
    const __m256 zero = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 xv = _mm256_loadu_ps(x + i);
        const __m256 gv = _mm256_loadu_ps(gy + i);
        const __m256 neg = _mm256_mul_ps(sv, gv);
        const __m256 mask = _mm256_cmp_ps(xv, zero, _CMP_GT_OQ);
        _mm256_storeu_ps(gx + i, _mm256_blendv_ps(neg, gv, mask));
    }
    for (; i < n; ++i) gx[i] = x[i] > 0.0f ? gy[i] : slope * gy[i];
}

void v_adam_update(std::size_t n, float* p, const float* g, float* m, float* v, float lr,
                   float b1, float b2, float eps, float b1c, float b2c) {
    const __m256 b1v = _mm256_set1_ps(b1);
    const __m256 b1r = _mm256_set1_ps(1.0f - b1);
    const __m256 b2v = _mm256_set1_ps(b2);
    const __m256 b2r = _mm256_set1_ps(1.0f - b2);
    const __m256 lrv = _mm256_set1_ps(lr);
    const __m256 epsv = _mm256_set1_ps(eps);
    const __m256 ib1c = _mm256_set1_ps(1.0f / b1c);
    const __m256 ib2c = _mm256_set1_ps(1.0f / b2c);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 gv = _mm256_loadu_ps(g + i);
        __m256 mv = _mm256_loadu_ps(m + i);
        __m256 vv = _mm256_loadu_ps(v + i);
        mv = _mm256_fmadd_ps(b1v, mv, _mm256_mul_ps(b1r, gv));
        vv = _mm256_fmadd_ps(b2v, vv, _mm256_mul_ps(b2r, _mm256_mul_ps(gv, gv)));
        _mm256_storeu_ps(m + i, mv);
        _mm256_storeu_ps(v + i, vv);
        const __m256 mhat = _mm256_mul_ps(mv, ib1c);
        const __m256 vhat = _mm256_mul_ps(vv, ib2c);
        const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(vhat), epsv);
        const __m256 step = _mm256_div_ps(_mm256_mul_ps(lrv, mhat), denom);
        _mm256_storeu_ps(p + i, _mm256_sub_ps(_mm256_loadu_ps(p + i), step));
    }
    for (; i < n; ++i) {
        m[i] = b1 * m[i] + (1.0f - b1) * g[i];
        v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
        const float mhat = m[i] * (1.0f / b1c);
        const float vhat = v[i] * (1.0f / b2c);
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

const KernelTable kAvx2Table = {
    v_axpy,       v_dot,        v_sum,        v_abs_diff_sum,    v_sq_diff_sum,
    v_accumulate, v_accumulate_prod, v_accumulate_centered_sq, v_vec_fma,
    v_leaky_relu, v_leaky_relu_grad, v_adam_update,
};

}  // namespace

const KernelTable& avx2_kernel_table() { return kAvx2Table; }

}  // namespace anomgait::kernels

#endif  // x86
