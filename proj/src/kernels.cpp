#include "anomgait/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
#define ANOMGAIT_X86 1
#include <cpuid.h>
#else
#define ANOMGAIT_X86 0
#endif

namespace anomgait::kernels {

namespace {

void s_axpy(std::size_t n, float a, const float* x, float* y) {
    scalar::axpy(n, a, x, y);
}
float s_dot(std::size_t n, const float* x, const float* y) {
    return scalar::dot(n, x, y);
}
float s_sum(std::size_t n, const float* x) { return scalar::sum(n, x); }
float s_abs_diff_sum(std::size_t n, const float* a, const float* b) {
    return scalar::abs_diff_sum(n, a, b);
}
float s_sq_diff_sum(std::size_t n, const float* a, const float* b) {
    return scalar::sq_diff_sum(n, a, b);
}
void s_accumulate(std::size_t n, const float* x, float* acc) {
    scalar::accumulate(n, x, acc);
}
void s_accumulate_prod(std::size_t n, const float* x, const float* y, float* acc) {
    scalar::accumulate_prod(n, x, y, acc);
}
void s_accumulate_centered_sq(std::size_t n, const float* x, const float* mean,
                              float* acc) {
    scalar::accumulate_centered_sq(n, x, mean, acc);
}
void s_vec_fma(std::size_t n, const float* x, const float* a, const float* b, float* o) {
    scalar::vec_fma(n, x, a, b, o);
}
void s_leaky_relu(std::size_t n, float s, const float* x, float* y) {
    scalar::leaky_relu(n, s, x, y);
}
void s_leaky_relu_grad(std::size_t n, float s, const float* x, const float* gy,
                       float* gx) {
    scalar::leaky_relu_grad(n, s, x, gy, gx);
}
void s_adam_update(std::size_t n, float* p, const float* g, float* m, float* v, float lr,
                   float b1, float b2, float eps, float b1c, float b2c) {
    scalar::adam_update(n, p, g, m, v, lr, b1, b2, eps, b1c, b2c);
}

const KernelTable kScalarTable = {
    s_axpy,       s_dot,        s_sum,        s_abs_diff_sum,    s_sq_diff_sum,
    s_accumulate, s_accumulate_prod, s_accumulate_centered_sq, s_vec_fma,
    s_leaky_relu, s_leaky_relu_grad, s_adam_update,
};

bool cpu_has_avx2() {
#if ANOMGAIT_X86 && defined(ANOMGAIT_HAVE_AVX2_TU)
    unsigned eax, ebx, ecx, edx;
    if (!__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) return false;
    const bool avx2 = (ebx & (1u << 5)) != 0;
    if (!__get_cpuid(1, &eax, &ebx, &ecx, &edx)) return false;
    const bool fma = (ecx & (1u << 12)) != 0;
    return avx2 && fma;
#else
    return false;
#endif
}

Backend pick_default_backend() {
    if (const char* env = std::getenv("ANOMGAIT_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && backend_supported(Backend::avx2))
            return Backend::avx2;
    }
    return backend_supported(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

std::atomic<const KernelTable*> g_table{nullptr};
std::atomic<Backend> g_backend{Backend::scalar};

void ensure_initialized() {
    if (g_table.load(std::memory_order_acquire) == nullptr) {
        const Backend b = pick_default_backend();
        g_backend.store(b, std::memory_order_relaxed);
        g_table.store(&table_for(b), std::memory_order_release);
    }
}

}  // namespace

#if defined(ANOMGAIT_HAVE_AVX2_TU)
const KernelTable& avx2_kernel_table();  // kernels_avx2.cpp
#endif

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2: {
            static const bool ok = cpu_has_avx2();
            return ok;
        }
    }
    return false;
}

const KernelTable& table_for(Backend b) {
    switch (b) {
        case Backend::scalar: return kScalarTable;
        case Backend::avx2:
#if defined(ANOMGAIT_HAVE_AVX2_TU)
            if (backend_supported(Backend::avx2)) return avx2_kernel_table();
#endif
            throw std::invalid_argument("avx2 kernels not supported on this CPU");
    }
    throw std::invalid_argument("unknown kernel backend");
}

Backend active_backend() {
    ensure_initialized();
    return g_backend.load(std::memory_order_relaxed);
}

void set_backend(Backend b) {
    const KernelTable& t = table_for(b);  // throws if unsupported
    g_backend.store(b, std::memory_order_relaxed);
    g_table.store(&t, std::memory_order_release);
}

const KernelTable& table() {
    ensure_initialized();
    return *g_table.load(std::memory_order_acquire);
}

}  // namespace anomgait::kernels
