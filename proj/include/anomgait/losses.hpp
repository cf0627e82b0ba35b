#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "anomgait/kernels.hpp"
#include "anomgait/model.hpp"
#include "anomgait/video.hpp"
#include "anomgait/volume.hpp"

namespace anomgait {

// ---------------------------------------------------------------------------
// The four losses. Contextual is the mean absolute difference; encoder and
// adversarial are unnormalized Euclidean norms of embedding differences; the
// discriminator loss is the negated half-sum cross-entropy so the trainer
// minimizes it.
// ---------------------------------------------------------------------------

template <typename T>
T contextual_loss(const Volume<T>& x, const Volume<T>& xr) {
    require_same_shape(x, xr, "contextual_loss: dim mismatch");
    return kernels::abs_diff_sum(x.size(), x.data.data(), xr.data.data()) /
           static_cast<T>(x.size());
}

inline float contextual_loss(const VideoClip& x, const VideoClip& xr) {
    if (x.f != xr.f || x.h != xr.h || x.w != xr.w || x.c != xr.c)
        throw dim_mismatch_error("contextual_loss: dim mismatch");
    return kernels::abs_diff_sum(x.data.size(), x.data.data(), xr.data.data()) /
           static_cast<float>(x.data.size());
}

template <typename T>
T l2_embedding_loss(const std::vector<T>& a, const std::vector<T>& b, const char* what) {
    if (a.size() != b.size()) throw dim_mismatch_error(what);
    return std::sqrt(kernels::sq_diff_sum(a.size(), a.data(), b.data()));
}

template <typename T>
T encoder_loss(const std::vector<T>& z, const std::vector<T>& zp) {
    return l2_embedding_loss(z, zp, "encoder_loss: length mismatch");
}

template <typename T>
T encoder_loss(const Embedding<T>& z, const Embedding<T>& zp) {
    return encoder_loss(z.values, zp.values);
}

template <typename T>
T adversarial_loss(const std::vector<T>& zd, const std::vector<T>& zdp) {
    return l2_embedding_loss(zd, zdp, "adversarial_loss: length mismatch");
}

template <typename T>
T adversarial_loss(const Embedding<T>& zd, const Embedding<T>& zdp) {
    return adversarial_loss(zd.values, zdp.values);
}

// -(log y + log(1 - y')) / 2, inputs clamped to [eps, 1-eps].
template <typename T>
T discriminator_loss(T y, T y_prime) {
    const T eps = T(1e-7);
    const T yc = std::clamp(y, eps, T(1) - eps);
    const T ypc = std::clamp(y_prime, eps, T(1) - eps);
    return -(std::log(yc) + std::log(T(1) - ypc)) / T(2);
}

// ---------------------------------------------------------------------------
// Batch forms used by the training loop and the gradient checks. Embedding
// losses average per-item norms over the batch; the gradients below are
// already scaled for that mean.
// ---------------------------------------------------------------------------

template <typename T>
struct BatchL2 {
    T mean = T(0);
    std::vector<T> per_item;  // one norm per batch item
};

template <typename T>
BatchL2<T> batch_l2_loss(const Volume<T>& a, const Volume<T>& b) {
    require_same_shape(a, b, "batch_l2_loss: dim mismatch");
    BatchL2<T> r;
    r.per_item.resize(a.b);
    const std::size_t per = a.size() / static_cast<std::size_t>(a.b);
    for (int i = 0; i < a.b; ++i) {
        r.per_item[i] = std::sqrt(
            kernels::sq_diff_sum(per, a.data.data() + i * per, b.data.data() + i * per));
        r.mean += r.per_item[i];
    }
    r.mean /= static_cast<T>(a.b);
    return r;
}

// scale * d(mean_b ||a_b - b_b||) / da ; the gradient w.r.t. b is its negation.
template <typename T>
Volume<T> batch_l2_grad(const Volume<T>& a, const Volume<T>& b, const BatchL2<T>& loss,
                        T scale) {
    Volume<T> g(a.b, a.f, a.h, a.w, a.c);
    const std::size_t per = a.size() / static_cast<std::size_t>(a.b);
    for (int i = 0; i < a.b; ++i) {
        const T norm = loss.per_item[i];
        if (norm <= T(0)) continue;
        const T s = scale / (norm * static_cast<T>(a.b));
        for (std::size_t j = 0; j < per; ++j) {
            const std::size_t idx = i * per + j;
            g.data[idx] = s * (a.data[idx] - b.data[idx]);
        }
    }
    return g;
}

// scale * d(mean|x - xr|) / dxr  (subgradient 0 at exact ties).
template <typename T>
Volume<T> contextual_grad_wrt_reconstruction(const Volume<T>& x, const Volume<T>& xr,
                                             T scale) {
    Volume<T> g(x.b, x.f, x.h, x.w, x.c);
    const T s = scale / static_cast<T>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const T d = x.data[i] - xr.data[i];
        g.data[i] = d > T(0) ? -s : (d < T(0) ? s : T(0));
    }
    return g;
}

}  // namespace anomgait
