#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "anomgait/kernels.hpp"
#include "anomgait/volume.hpp"

// Volumetric layers with explicit forward/backward passes. Inner loops run
// on the kernel primitives: the channel axis is contiguous, so convolution
// forward is a broadcast-axpy over output channels, backward-data a dot over
// output channels, and backward-weights an axpy into the kernel slice.

namespace anomgait {

// ---------------------------------------------------------------------------
// 3D convolution, kernel k^3, weight layout [kt][ky][kx][ci][co].
// ---------------------------------------------------------------------------
template <typename T>
struct Conv3d {
    int k = 4, stride = 2, pad = 1;
    int ci = 0, co = 0;
    std::vector<T> w, bias;
    std::vector<T> gw, gb;

    void init_shape(int k_, int stride_, int pad_, int ci_, int co_) {
        k = k_;
        stride = stride_;
        pad = pad_;
        ci = ci_;
        co = co_;
        w.assign(static_cast<std::size_t>(k) * k * k * ci * co, T(0));
        bias.assign(co, T(0));
        gw.assign(w.size(), T(0));
        gb.assign(bias.size(), T(0));
    }

    int out_side(int in_side) const { return (in_side + 2 * pad - k) / stride + 1; }

    std::size_t w_offset(int kt, int ky, int kx) const {
        return ((static_cast<std::size_t>(kt) * k + ky) * k + kx) *
               static_cast<std::size_t>(ci) * co;
    }

    Volume<T> forward(const Volume<T>& in) const {
        if (in.c != ci) throw dim_mismatch_error("conv3d: channel mismatch");
        const int of = out_side(in.f), oh = out_side(in.h), ow = out_side(in.w);
        if (of < 1 || oh < 1 || ow < 1)
            throw dim_mismatch_error("conv3d: input too small");
        Volume<T> out(in.b, of, oh, ow, co);
        for (int b = 0; b < in.b; ++b)
            for (int ot = 0; ot < of; ++ot)
                for (int oy = 0; oy < oh; ++oy)
                    for (int ox = 0; ox < ow; ++ox) {
                        T* o = out.at(b, ot, oy, ox);
                        for (int cc = 0; cc < co; ++cc) o[cc] = bias[cc];
                        for (int kt = 0; kt < k; ++kt) {
                            const int it = ot * stride - pad + kt;
                            if (it < 0 || it >= in.f) continue;
                            for (int ky = 0; ky < k; ++ky) {
                                const int iy = oy * stride - pad + ky;
                                if (iy < 0 || iy >= in.h) continue;
                                for (int kx = 0; kx < k; ++kx) {
                                    const int ix = ox * stride - pad + kx;
                                    if (ix < 0 || ix >= in.w) continue;
                                    const T* ip = in.at(b, it, iy, ix);
                                    const T* wp = w.data() + w_offset(kt, ky, kx);
                                    for (int cc = 0; cc < ci; ++cc)
                                        kernels::axpy(static_cast<std::size_t>(co),
                                                      ip[cc], wp + cc * co, o);
                                }
                            }
                        }
                    }
        return out;
    }

    // Accumulates gw/gb, returns the gradient w.r.t. the input.
    Volume<T> backward(const Volume<T>& in, const Volume<T>& gout) {
        Volume<T> gin(in.b, in.f, in.h, in.w, ci);
        for (int b = 0; b < gout.b; ++b)
            for (int ot = 0; ot < gout.f; ++ot)
                for (int oy = 0; oy < gout.h; ++oy)
                    for (int ox = 0; ox < gout.w; ++ox) {
                        const T* g = gout.at(b, ot, oy, ox);
                        kernels::accumulate(static_cast<std::size_t>(co), g, gb.data());
                        for (int kt = 0; kt < k; ++kt) {
                            const int it = ot * stride - pad + kt;
                            if (it < 0 || it >= in.f) continue;
                            for (int ky = 0; ky < k; ++ky) {
                                const int iy = oy * stride - pad + ky;
                                if (iy < 0 || iy >= in.h) continue;
                                for (int kx = 0; kx < k; ++kx) {
                                    const int ix = ox * stride - pad + kx;
                                    if (ix < 0 || ix >= in.w) continue;
                                    const T* ip = in.at(b, it, iy, ix);
                                    T* gi = gin.at(b, it, iy, ix);
                                    const T* wp = w.data() + w_offset(kt, ky, kx);
                                    T* gwp = gw.data() + w_offset(kt, ky, kx);
                                    for (int cc = 0; cc < ci; ++cc) {
                                        gi[cc] += kernels::dot(
                                            static_cast<std::size_t>(co), wp + cc * co, g);
                                        kernels::axpy(static_cast<std::size_t>(co),
                                                      ip[cc], g, gwp + cc * co);
                                    }
                                }
                            }
                        }
                    }
        return gin;
    }
};

// ---------------------------------------------------------------------------
// 3D transposed convolution (scatter form), weight layout [kt][ky][kx][ci][co]
// with ci the low-resolution side.
// ---------------------------------------------------------------------------
template <typename T>
struct ConvT3d {
    int k = 4, stride = 2, pad = 1;
    int ci = 0, co = 0;
    std::vector<T> w, bias;
    std::vector<T> gw, gb;

    void init_shape(int k_, int stride_, int pad_, int ci_, int co_) {
        k = k_;
        stride = stride_;
        pad = pad_;
        ci = ci_;
        co = co_;
        w.assign(static_cast<std::size_t>(k) * k * k * ci * co, T(0));
        bias.assign(co, T(0));
        gw.assign(w.size(), T(0));
        gb.assign(bias.size(), T(0));
    }

    int out_side(int in_side) const { return (in_side - 1) * stride - 2 * pad + k; }

    std::size_t w_offset(int kt, int ky, int kx) const {
        return ((static_cast<std::size_t>(kt) * k + ky) * k + kx) *
               static_cast<std::size_t>(ci) * co;
    }

    Volume<T> forward(const Volume<T>& in) const {
        if (in.c != ci) throw dim_mismatch_error("convT3d: channel mismatch");
        const int of = out_side(in.f), oh = out_side(in.h), ow = out_side(in.w);
        if (of < 1 || oh < 1 || ow < 1)
            throw dim_mismatch_error("convT3d: input too small");
        Volume<T> out(in.b, of, oh, ow, co);
        for (int b = 0; b < in.b; ++b)
            for (int ot = 0; ot < of; ++ot)
                for (int oy = 0; oy < oh; ++oy)
                    for (int ox = 0; ox < ow; ++ox) {
                        T* o = out.at(b, ot, oy, ox);
                        for (int cc = 0; cc < co; ++cc) o[cc] = bias[cc];
                    }
        for (int b = 0; b < in.b; ++b)
            for (int it = 0; it < in.f; ++it)
                for (int iy = 0; iy < in.h; ++iy)
                    for (int ix = 0; ix < in.w; ++ix) {
                        const T* ip = in.at(b, it, iy, ix);
                        for (int kt = 0; kt < k; ++kt) {
                            const int ot = it * stride - pad + kt;
                            if (ot < 0 || ot >= of) continue;
                            for (int ky = 0; ky < k; ++ky) {
                                const int oy = iy * stride - pad + ky;
                                if (oy < 0 || oy >= oh) continue;
                                for (int kx = 0; kx < k; ++kx) {
                                    const int ox = ix * stride - pad + kx;
                                    if (ox < 0 || ox >= ow) continue;
                                    T* o = out.at(b, ot, oy, ox);
                                    const T* wp = w.data() + w_offset(kt, ky, kx);
                                    for (int cc = 0; cc < ci; ++cc)
                                        kernels::axpy(static_cast<std::size_t>(co),
                                                      ip[cc], wp + cc * co, o);
                                }
                            }
                        }
                    }
        return out;
    }

    Volume<T> backward(const Volume<T>& in, const Volume<T>& gout) {
        const int of = gout.f, oh = gout.h, ow = gout.w;
        Volume<T> gin(in.b, in.f, in.h, in.w, ci);
        for (int b = 0; b < gout.b; ++b)
            for (int ot = 0; ot < of; ++ot)
                for (int oy = 0; oy < oh; ++oy)
                    for (int ox = 0; ox < ow; ++ox)
                        kernels::accumulate(static_cast<std::size_t>(co),
                                            gout.at(b, ot, oy, ox), gb.data());
        for (int b = 0; b < in.b; ++b)
            for (int it = 0; it < in.f; ++it)
                for (int iy = 0; iy < in.h; ++iy)
                    for (int ix = 0; ix < in.w; ++ix) {
                        const T* ip = in.at(b, it, iy, ix);
                        T* gi = gin.at(b, it, iy, ix);
                        for (int kt = 0; kt < k; ++kt) {
                            const int ot = it * stride - pad + kt;
                            if (ot < 0 || ot >= of) continue;
                            for (int ky = 0; ky < k; ++ky) {
                                const int oy = iy * stride - pad + ky;
                                if (oy < 0 || oy >= oh) continue;
                                for (int kx = 0; kx < k; ++kx) {
                                    const int ox = ix * stride - pad + kx;
                                    if (ox < 0 || ox >= ow) continue;
                                    const T* g = gout.at(b, ot, oy, ox);
                                    const T* wp = w.data() + w_offset(kt, ky, kx);
                                    T* gwp = gw.data() + w_offset(kt, ky, kx);
                                    for (int cc = 0; cc < ci; ++cc) {
                                        gi[cc] += kernels::dot(
                                            static_cast<std::size_t>(co), wp + cc * co, g);
                                        kernels::axpy(static_cast<std::size_t>(co),
                                                      ip[cc], g, gwp + cc * co);
                                    }
                                }
                            }
                        }
                    }
        return gin;
    }
};

// ---------------------------------------------------------------------------
// Per-channel batch normalization over (batch, frames, height, width).
// Train mode normalizes with biased batch statistics and folds them into the
// running stats (unbiased variance, PyTorch-style momentum); eval mode is a
// pure affine map from the running stats.
// ---------------------------------------------------------------------------
template <typename T>
struct BatchNorm3d {
    int c = 0;
    T momentum = T(0.1), eps = T(1e-5);
    std::vector<T> gamma, beta, running_mean, running_var;
    std::vector<T> ggamma, gbeta;

    void init_shape(int c_, T momentum_, T eps_) {
        c = c_;
        momentum = momentum_;
        eps = eps_;
        gamma.assign(c, T(1));
        beta.assign(c, T(0));
        running_mean.assign(c, T(0));
        running_var.assign(c, T(1));
        ggamma.assign(c, T(0));
        gbeta.assign(c, T(0));
    }

    struct Ctx {
        std::vector<T> xhat;     // normalized activations, input layout
        std::vector<T> inv_std;  // per channel
    };

    Volume<T> forward_train(const Volume<T>& in, Ctx& ctx) {
        const std::size_t rows = in.voxels();
        const std::size_t n = static_cast<std::size_t>(c);
        const T count = static_cast<T>(rows);

        std::vector<T> mean(n, T(0)), var(n, T(0));
        for (std::size_t r = 0; r < rows; ++r)
            kernels::accumulate(n, in.data.data() + r * n, mean.data());
        for (std::size_t i = 0; i < n; ++i) mean[i] /= count;
        for (std::size_t r = 0; r < rows; ++r)
            kernels::accumulate_centered_sq(n, in.data.data() + r * n, mean.data(),
                                            var.data());
        for (std::size_t i = 0; i < n; ++i) var[i] /= count;

        ctx.inv_std.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            ctx.inv_std[i] = T(1) / std::sqrt(var[i] + eps);

        std::vector<T> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = ctx.inv_std[i];
            b[i] = -mean[i] * ctx.inv_std[i];
        }
        ctx.xhat.resize(in.size());
        for (std::size_t r = 0; r < rows; ++r)
            kernels::vec_fma(n, in.data.data() + r * n, a.data(), b.data(),
                             ctx.xhat.data() + r * n);

        Volume<T> out(in.b, in.f, in.h, in.w, c);
        for (std::size_t r = 0; r < rows; ++r)
            kernels::vec_fma(n, ctx.xhat.data() + r * n, gamma.data(), beta.data(),
                             out.data.data() + r * n);

        const T unbias = rows > 1 ? count / (count - T(1)) : T(1);
        for (std::size_t i = 0; i < n; ++i) {
            running_mean[i] = (T(1) - momentum) * running_mean[i] + momentum * mean[i];
            running_var[i] =
                (T(1) - momentum) * running_var[i] + momentum * var[i] * unbias;
        }
        return out;
    }

    Volume<T> forward_eval(const Volume<T>& in) const {
        const std::size_t rows = in.voxels();
        const std::size_t n = static_cast<std::size_t>(c);
        std::vector<T> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            const T isd = T(1) / std::sqrt(running_var[i] + eps);
            a[i] = gamma[i] * isd;
            b[i] = beta[i] - running_mean[i] * a[i];
        }
        Volume<T> out(in.b, in.f, in.h, in.w, c);
        for (std::size_t r = 0; r < rows; ++r)
            kernels::vec_fma(n, in.data.data() + r * n, a.data(), b.data(),
                             out.data.data() + r * n);
        return out;
    }

    Volume<T> backward(const Ctx& ctx, const Volume<T>& gout) {
        const std::size_t rows = gout.voxels();
        const std::size_t n = static_cast<std::size_t>(c);
        const T count = static_cast<T>(rows);

        std::vector<T> sum_gy(n, T(0)), sum_gyx(n, T(0));
        for (std::size_t r = 0; r < rows; ++r) {
            kernels::accumulate(n, gout.data.data() + r * n, sum_gy.data());
            kernels::accumulate_prod(n, gout.data.data() + r * n,
                                     ctx.xhat.data() + r * n, sum_gyx.data());
        }
        kernels::accumulate(n, sum_gy.data(), gbeta.data());
        kernels::accumulate(n, sum_gyx.data(), ggamma.data());

        // dx = A*gy + B*xhat + C with per-channel coefficients.
        std::vector<T> A(n), B(n), C(n);
        for (std::size_t i = 0; i < n; ++i) {
            const T gis = gamma[i] * ctx.inv_std[i];
            A[i] = gis;
            B[i] = -gis * sum_gyx[i] / count;
            C[i] = -gis * sum_gy[i] / count;
        }
        Volume<T> gin(gout.b, gout.f, gout.h, gout.w, c);
        for (std::size_t r = 0; r < rows; ++r) {
            T* gi = gin.data.data() + r * n;
            kernels::vec_fma(n, gout.data.data() + r * n, A.data(), C.data(), gi);
            kernels::accumulate_prod(n, ctx.xhat.data() + r * n, B.data(), gi);
        }
        return gin;
    }
};

// ---------------------------------------------------------------------------
// Elementwise activations.
// ---------------------------------------------------------------------------
template <typename T>
Volume<T> leaky_relu_forward(const Volume<T>& in, T slope) {
    Volume<T> out(in.b, in.f, in.h, in.w, in.c);
    kernels::leaky_relu(in.size(), slope, in.data.data(), out.data.data());
    return out;
}

template <typename T>
Volume<T> leaky_relu_backward(const Volume<T>& pre_act, T slope, const Volume<T>& gout) {
    Volume<T> gin(gout.b, gout.f, gout.h, gout.w, gout.c);
    kernels::leaky_relu_grad(gout.size(), slope, pre_act.data.data(), gout.data.data(),
                             gin.data.data());
    return gin;
}

template <typename T>
Volume<T> sigmoid_forward(const Volume<T>& in) {
    Volume<T> out(in.b, in.f, in.h, in.w, in.c);
    for (std::size_t i = 0; i < in.size(); ++i) {
        const T x = in.data[i];
        if (x >= T(0)) {
            out.data[i] = T(1) / (T(1) + std::exp(-x));
        } else {
            const T e = std::exp(x);
            out.data[i] = e / (T(1) + e);
        }
    }
    return out;
}

template <typename T>
Volume<T> sigmoid_backward(const Volume<T>& y, const Volume<T>& gout) {
    Volume<T> gin(gout.b, gout.f, gout.h, gout.w, gout.c);
    for (std::size_t i = 0; i < gout.size(); ++i)
        gin.data[i] = gout.data[i] * y.data[i] * (T(1) - y.data[i]);
    return gin;
}

template <typename T>
bool all_finite(const Volume<T>& v) {
    for (const T& x : v.data)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace anomgait
