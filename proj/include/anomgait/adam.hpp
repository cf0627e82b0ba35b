#pragma once

#include <cmath>
#include <vector>

#include "anomgait/kernels.hpp"
#include "anomgait/model.hpp"

namespace anomgait {

template <typename T>
struct AdamConfig {
    T lr = T(2e-4);
    T beta1 = T(0.5);
    T beta2 = T(0.999);
    T eps = T(1e-8);
};

// First/second moment buffers aligned with the learnable entries of a
// parameter registry; t is the shared step counter.
template <typename T>
struct AdamState {
    std::vector<std::vector<T>> m, v;
    long t = 0;

    void init(const std::vector<ParamRef<T>>& params) {
        m.clear();
        v.clear();
        for (const auto& p : params) {
            m.emplace_back(p.learnable ? p.value->size() : 0, T(0));
            v.emplace_back(p.learnable ? p.value->size() : 0, T(0));
        }
        t = 0;
    }
};

// One bias-corrected Adam step over every learnable parameter. Gradients are
// read from the registry's grad pointers; buffers are skipped.
template <typename T>
void adam_step(AdamState<T>& state, std::vector<ParamRef<T>>& params,
               const AdamConfig<T>& cfg) {
    if (state.m.size() != params.size())
        throw std::invalid_argument("adam_step: state/parameter registry mismatch");
    ++state.t;
    const T b1c = T(1) - std::pow(cfg.beta1, static_cast<T>(state.t));
    const T b2c = T(1) - std::pow(cfg.beta2, static_cast<T>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i];
        if (!p.learnable || !p.grad) continue;
        if (p.grad->size() != p.value->size())
            throw std::invalid_argument("adam_step: grad shape mismatch for " + p.name);
        kernels::adam_update(p.value->size(), p.value->data(), p.grad->data(),
                             state.m[i].data(), state.v[i].data(), cfg.lr, cfg.beta1,
                             cfg.beta2, cfg.eps, b1c, b2c);
    }
}

}  // namespace anomgait
