#pragma once

#include <cmath>
#include <cstddef>

// Scalar reference kernels. These are the ground-truth implementations:
// the SIMD backends in kernels.cpp must agree with them (see the kernel
// equivalence tests), and the double-precision model used by the gradient
// checks runs on them directly.

namespace anomgait::kernels::scalar {

// y += a * x
template <typename T>
inline void axpy(std::size_t n, T a, const T* x, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

template <typename T>
inline T dot(std::size_t n, const T* x, const T* y) {
    T acc = T(0);
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

template <typename T>
inline T sum(std::size_t n, const T* x) {
    T acc = T(0);
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

template <typename T>
inline T abs_diff_sum(std::size_t n, const T* a, const T* b) {
    T acc = T(0);
    for (std::size_t i = 0; i < n; ++i) acc += std::abs(a[i] - b[i]);
    return acc;
}

template <typename T>
inline T sq_diff_sum(std::size_t n, const T* a, const T* b) {
    T acc = T(0);
    for (std::size_t i = 0; i < n; ++i) {
        const T d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

// acc += x
template <typename T>
inline void accumulate(std::size_t n, const T* x, T* acc) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

// acc += x * y
template <typename T>
inline void accumulate_prod(std::size_t n, const T* x, const T* y, T* acc) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i] * y[i];
}

// acc += (x - mean)^2
template <typename T>
inline void accumulate_centered_sq(std::size_t n, const T* x, const T* mean, T* acc) {
    for (std::size_t i = 0; i < n; ++i) {
        const T d = x[i] - mean[i];
        acc[i] += d * d;
    }
}

// out = x * a + b  (a, b broadcast arrays of the same length as the row)
template <typename T>
inline void vec_fma(std::size_t n, const T* x, const T* a, const T* b, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * a[i] + b[i];
}

template <typename T>
inline void leaky_relu(std::size_t n, T slope, const T* x, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : slope * x[i];
}

template <typename T>
inline void leaky_relu_grad(std::size_t n, T slope, const T* x, const T* gy, T* gx) {
    for (std::size_t i = 0; i < n; ++i) gx[i] = x[i] > T(0) ? gy[i] : slope * gy[i];
}

// One Adam step over a contiguous parameter block. b1c and b2c are the
// bias-correction factors 1 - beta^t, precomputed by the caller.
template <typename T>
inline void adam_update(std::size_t n, T* p, const T* g, T* m, T* v, T lr, T beta1,
                        T beta2, T eps, T b1c, T b2c) {
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = beta1 * m[i] + (T(1) - beta1) * g[i];
        v[i] = beta2 * v[i] + (T(1) - beta2) * g[i] * g[i];
        const T mhat = m[i] / b1c;
        const T vhat = v[i] / b2c;
        p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

}  // namespace anomgait::kernels::scalar
