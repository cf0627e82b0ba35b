#pragma once

#include <cstddef>
#include <string>

#include "anomgait/kernels_scalar.hpp"

// Runtime-dispatched float kernels. The float overloads below route to the
// backend selected at startup (AVX2 where the CPU supports it, scalar
// otherwise); the generic templates fall through to the scalar reference so
// the same layer code can be instantiated at double precision.

namespace anomgait::kernels {

enum class Backend { scalar, avx2 };

const char* backend_name(Backend b);
bool backend_supported(Backend b);

// Active backend. Initialized on first use from the best supported backend,
// honoring the ANOMGAIT_SIMD environment variable ("scalar" or "avx2").
Backend active_backend();
void set_backend(Backend b);  // throws std::invalid_argument if unsupported

struct KernelTable {
    void (*axpy)(std::size_t, float, const float*, float*);
    float (*dot)(std::size_t, const float*, const float*);
    float (*sum)(std::size_t, const float*);
    float (*abs_diff_sum)(std::size_t, const float*, const float*);
    float (*sq_diff_sum)(std::size_t, const float*, const float*);
    void (*accumulate)(std::size_t, const float*, float*);
    void (*accumulate_prod)(std::size_t, const float*, const float*, float*);
    void (*accumulate_centered_sq)(std::size_t, const float*, const float*, float*);
    void (*vec_fma)(std::size_t, const float*, const float*, const float*, float*);
    void (*leaky_relu)(std::size_t, float, const float*, float*);
    void (*leaky_relu_grad)(std::size_t, float, const float*, const float*, float*);
    void (*adam_update)(std::size_t, float*, const float*, float*, float*, float, float,
                        float, float, float, float);
};

const KernelTable& table();                 // active backend
const KernelTable& table_for(Backend b);    // explicit backend (for tests)

// ---- dispatched float entry points ----------------------------------------

inline void axpy(std::size_t n, float a, const float* x, float* y) {
    table().axpy(n, a, x, y);
}
inline float dot(std::size_t n, const float* x, const float* y) {
    return table().dot(n, x, y);
}
inline float sum(std::size_t n, const float* x) { return table().sum(n, x); }
inline float abs_diff_sum(std::size_t n, const float* a, const float* b) {
    return table().abs_diff_sum(n, a, b);
}
inline float sq_diff_sum(std::size_t n, const float* a, const float* b) {
    return table().sq_diff_sum(n, a, b);
}
inline void accumulate(std::size_t n, const float* x, float* acc) {
    table().accumulate(n, x, acc);
}
inline void accumulate_prod(std::size_t n, const float* x, const float* y, float* acc) {
    table().accumulate_prod(n, x, y, acc);
}
inline void accumulate_centered_sq(std::size_t n, const float* x, const float* mean,
                                   float* acc) {
    table().accumulate_centered_sq(n, x, mean, acc);
}
inline void vec_fma(std::size_t n, const float* x, const float* a, const float* b,
                    float* out) {
    table().vec_fma(n, x, a, b, out);
}
inline void leaky_relu(std::size_t n, float slope, const float* x, float* y) {
    table().leaky_relu(n, slope, x, y);
}
inline void leaky_relu_grad(std::size_t n, float slope, const float* x, const float* gy,
                            float* gx) {
    table().leaky_relu_grad(n, slope, x, gy, gx);
}
inline void adam_update(std::size_t n, float* p, const float* g, float* m, float* v,
                        float lr, float b1, float b2, float eps, float b1c, float b2c) {
    table().adam_update(n, p, g, m, v, lr, b1, b2, eps, b1c, b2c);
}

// ---- generic fallthrough for non-float scalar types ------------------------

template <typename T>
inline void axpy(std::size_t n, T a, const T* x, T* y) {
    scalar::axpy(n, a, x, y);
}
template <typename T>
inline T dot(std::size_t n, const T* x, const T* y) {
    return scalar::dot(n, x, y);
}
template <typename T>
inline T sum(std::size_t n, const T* x) {
    return scalar::sum(n, x);
}
template <typename T>
inline T abs_diff_sum(std::size_t n, const T* a, const T* b) {
    return scalar::abs_diff_sum(n, a, b);
}
template <typename T>
inline T sq_diff_sum(std::size_t n, const T* a, const T* b) {
    return scalar::sq_diff_sum(n, a, b);
}
template <typename T>
inline void accumulate(std::size_t n, const T* x, T* acc) {
    scalar::accumulate(n, x, acc);
}
template <typename T>
inline void accumulate_prod(std::size_t n, const T* x, const T* y, T* acc) {
    scalar::accumulate_prod(n, x, y, acc);
}
template <typename T>
inline void accumulate_centered_sq(std::size_t n, const T* x, const T* mean, T* acc) {
    scalar::accumulate_centered_sq(n, x, mean, acc);
}
template <typename T>
inline void vec_fma(std::size_t n, const T* x, const T* a, const T* b, T* out) {
    scalar::vec_fma(n, x, a, b, out);
}
template <typename T>
inline void leaky_relu(std::size_t n, T slope, const T* x, T* y) {
    scalar::leaky_relu(n, slope, x, y);
}
template <typename T>
inline void leaky_relu_grad(std::size_t n, T slope, const T* x, const T* gy, T* gx) {
    scalar::leaky_relu_grad(n, slope, x, gy, gx);
}
template <typename T>
inline void adam_update(std::size_t n, T* p, const T* g, T* m, T* v, T lr, T b1, T b2,
                        T eps, T b1c, T b2c) {
    scalar::adam_update(n, p, g, m, v, lr, b1, b2, eps, b1c, b2c);
}

}  // namespace anomgait::kernels
