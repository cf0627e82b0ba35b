#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "anomgait/kernels.hpp"
#include "anomgait/rng.hpp"

using namespace anomgait;

namespace {

std::vector<float> random_vec(Rng& rng, std::size_t n, double lo = -2.0,
                              double hi = 2.0) {
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(rng.uniform(lo, hi));
    return v;
}

// Sizes hitting the vector body, the remainder loop, and the empty case.
const std::size_t kSizes[] = {0, 1, 3, 7, 8, 9, 16, 31, 64, 1000, 4097};

bool close(float a, float b, float tol) {
    return std::abs(a - b) <= tol * std::max({1.0f, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("backend dispatch basics") {
    CHECK(kernels::backend_supported(kernels::Backend::scalar));
    const kernels::Backend active = kernels::active_backend();
    CHECK((active == kernels::Backend::scalar || active == kernels::Backend::avx2));
    CHECK(std::string(kernels::backend_name(kernels::Backend::scalar)) == "scalar");
    CHECK(std::string(kernels::backend_name(kernels::Backend::avx2)) == "avx2");
}

TEST_CASE("avx2 backend agrees with scalar reference") {
    if (!kernels::backend_supported(kernels::Backend::avx2)) {
        MESSAGE("avx2 unsupported on this CPU; equivalence suite skipped");
        return;
    }
    const auto& simd = kernels::table_for(kernels::Backend::avx2);
    const auto& ref = kernels::table_for(kernels::Backend::scalar);
    Rng rng(20240209);

    for (std::size_t n : kSizes) {
        auto x = random_vec(rng, n);
        auto y = random_vec(rng, n);
        const float a = static_cast<float>(rng.uniform(-1.5, 1.5));

        SUBCASE(("axpy n=" + std::to_string(n)).c_str()) {}
        {
            auto y1 = y, y2 = y;
            ref.axpy(n, a, x.data(), y1.data());
            simd.axpy(n, a, x.data(), y2.data());
            for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i], 1e-6f));
        }
        {
            const float d1 = ref.dot(n, x.data(), y.data());
            const float d2 = simd.dot(n, x.data(), y.data());
            CHECK(close(d1, d2, 1e-4f));
        }
        {
            CHECK(close(ref.sum(n, x.data()), simd.sum(n, x.data()), 1e-4f));
            CHECK(close(ref.abs_diff_sum(n, x.data(), y.data()),
                        simd.abs_diff_sum(n, x.data(), y.data()), 1e-4f));
            CHECK(close(ref.sq_diff_sum(n, x.data(), y.data()),
                        simd.sq_diff_sum(n, x.data(), y.data()), 1e-4f));
        }
        {
            auto acc1 = random_vec(rng, n);
            auto acc2 = acc1;
            ref.accumulate(n, x.data(), acc1.data());
            simd.accumulate(n, x.data(), acc2.data());
            for (std::size_t i = 0; i < n; ++i) CHECK(close(acc1[i], acc2[i], 1e-6f));

            ref.accumulate_prod(n, x.data(), y.data(), acc1.data());
            simd.accumulate_prod(n, x.data(), y.data(), acc2.data());
            for (std::size_t i = 0; i < n; ++i) CHECK(close(acc1[i], acc2[i], 1e-6f));

            ref.accumulate_centered_sq(n, x.data(), y.data(), acc1.data());
            simd.accumulate_centered_sq(n, x.data(), y.data(), acc2.data());
            for (std::size_t i = 0; i < n; ++i) CHECK(close(acc1[i], acc2[i], 1e-6f));
        }
        {
            auto b = random_vec(rng, n);
            std::vector<float> o1(n), o2(n);
            ref.vec_fma(n, x.data(), y.data(), b.data(), o1.data());
            simd.vec_fma(n, x.data(), y.data(), b.data(), o2.data());
            for (std::size_t i = 0; i < n; ++i) CHECK(close(o1[i], o2[i], 1e-6f));
        }
        {
            std::vector<float> o1(n), o2(n);
            ref.leaky_relu(n, 0.2f, x.data(), o1.data());
            simd.leaky_relu(n, 0.2f, x.data(), o2.data());
            for (std::size_t i = 0; i < n; ++i) CHECK(o1[i] == o2[i]);

            ref.leaky_relu_grad(n, 0.2f, x.data(), y.data(), o1.data());
            simd.leaky_relu_grad(n, 0.2f, x.data(), y.data(), o2.data());
            for (std::size_t i = 0; i < n; ++i) CHECK(o1[i] == o2[i]);
        }
        {
            auto p1 = random_vec(rng, n), g = random_vec(rng, n);
            auto m1 = random_vec(rng, n, 0.0, 0.5), v1 = random_vec(rng, n, 0.01, 0.5);
            auto p2 = p1, m2 = m1, v2 = v1;
            ref.adam_update(n, p1.data(), g.data(), m1.data(), v1.data(), 1e-3f, 0.5f,
                            0.999f, 1e-8f, 0.5f, 0.1f);
            simd.adam_update(n, p2.data(), g.data(), m2.data(), v2.data(), 1e-3f, 0.5f,
                             0.999f, 1e-8f, 0.5f, 0.1f);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(close(p1[i], p2[i], 1e-5f));
                CHECK(close(m1[i], m2[i], 1e-6f));
                CHECK(close(v1[i], v2[i], 1e-6f));
            }
        }
    }
}

TEST_CASE("scalar reference kernels compute the obvious things") {
    const double x[] = {1.0, 2.0, 3.0};
    const double y[] = {4.0, 5.0, 6.0};
    CHECK(kernels::dot(3, x, y) == doctest::Approx(32.0));
    CHECK(kernels::sum(3, x) == doctest::Approx(6.0));
    CHECK(kernels::abs_diff_sum(3, x, y) == doctest::Approx(9.0));
    CHECK(kernels::sq_diff_sum(3, x, y) == doctest::Approx(27.0));

    double acc[3] = {0, 0, 0};
    kernels::accumulate(3, x, acc);
    kernels::accumulate_prod(3, x, y, acc);
    CHECK(acc[0] == doctest::Approx(5.0));
    CHECK(acc[2] == doctest::Approx(21.0));
}

TEST_CASE("set_backend rejects unsupported and switches tables") {
    const kernels::Backend initial = kernels::active_backend();
    kernels::set_backend(kernels::Backend::scalar);
    CHECK(kernels::active_backend() == kernels::Backend::scalar);
    if (kernels::backend_supported(kernels::Backend::avx2)) {
        kernels::set_backend(kernels::Backend::avx2);
        CHECK(kernels::active_backend() == kernels::Backend::avx2);
    }
    kernels::set_backend(initial);
}
