#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anomgait/arch.hpp"
#include "anomgait/layers.hpp"
#include "anomgait/rng.hpp"
#include "anomgait/video.hpp"

namespace anomgait {

enum class Mode { train, eval };

enum class EmbeddingKind { z_g, z_g_prime, z_d, z_d_prime };

template <typename T>
struct Embedding {
    EmbeddingKind kind = EmbeddingKind::z_g;
    std::vector<T> values;
};

// ---------------------------------------------------------------------------
// Encoder tower: reducing levels (conv 4/2/1 + BN + LeakyReLU) down to side 4,
// then a bare 4x4x4 projection conv to 1x1x1 x out_channels. The input of the
// projection conv doubles as the feature tap (z_D for the discriminator).
// ---------------------------------------------------------------------------
template <typename T>
struct EncoderTower {
    int input_side = 0;
    int in_channels = 1;
    T slope = T(0.2);
    std::vector<Conv3d<T>> convs;     // reducing levels + final projection
    std::vector<BatchNorm3d<T>> bns;  // one per reducing level

    struct Tape {
        std::vector<Volume<T>> conv_in;                   // per level
        std::vector<Volume<T>> act_in;                    // per reducing level
        std::vector<typename BatchNorm3d<T>::Ctx> bn;     // per reducing level
    };

    struct Out {
        Volume<T> out;   // b x 1 x 1 x 1 x out_channels
        Volume<T> feat;  // b x 4 x 4 x 4 x pre-latent channels
    };

    void configure(const ArchConfig& arch, int in_ch, int out_ch) {
        arch.validate();
        input_side = arch.input_size;
        in_channels = in_ch;
        slope = static_cast<T>(arch.leaky_slope);
        const int reducing = arch.reducing_levels();
        convs.clear();
        bns.clear();
        convs.resize(reducing + 1);
        bns.resize(reducing);
        int ci = in_ch;
        for (int i = 0; i < reducing; ++i) {
            const int co = arch.channels_after_level(i);
            convs[i].init_shape(4, 2, 1, ci, co);
            bns[i].init_shape(co, static_cast<T>(arch.bn_momentum),
                              static_cast<T>(arch.bn_eps));
            ci = co;
        }
        convs[reducing].init_shape(4, 1, 0, ci, out_ch);
    }

    void check_input(const Volume<T>& x) const {
        if (x.f != input_side || x.h != input_side || x.w != input_side ||
            x.c != in_channels)
            throw dim_mismatch_error("encoder: input must be " +
                                     std::to_string(input_side) + "^3 x " +
                                     std::to_string(in_channels));
    }

    // Train-mode forward; updates BN running stats. A null tape discards the
    // backward context (used for gradient-free passes).
    Out forward_train(const Volume<T>& x, Tape* tape) {
        check_input(x);
        const int reducing = static_cast<int>(bns.size());
        if (tape) {
            tape->conv_in.clear();
            tape->act_in.clear();
            tape->bn.assign(reducing, {});
        }
        Volume<T> cur = x;
        for (int i = 0; i < reducing; ++i) {
            if (tape) tape->conv_in.push_back(cur);
            Volume<T> z = convs[i].forward(cur);
            typename BatchNorm3d<T>::Ctx local;
            typename BatchNorm3d<T>::Ctx& ctx = tape ? tape->bn[i] : local;
            Volume<T> pre = bns[i].forward_train(z, ctx);
            if (tape) tape->act_in.push_back(pre);
            cur = leaky_relu_forward(pre, slope);
        }
        if (tape) tape->conv_in.push_back(cur);
        Out r;
        r.feat = cur;
        r.out = convs[reducing].forward(cur);
        return r;
    }

    Out forward_eval(const Volume<T>& x) const {
        check_input(x);
        const int reducing = static_cast<int>(bns.size());
        Volume<T> cur = x;
        for (int i = 0; i < reducing; ++i) {
            Volume<T> z = convs[i].forward(cur);
            Volume<T> pre = bns[i].forward_eval(z);
            cur = leaky_relu_forward(pre, slope);
        }
        Out r;
        r.feat = cur;
        r.out = convs[reducing].forward(cur);
        return r;
    }

    // Backward through the tower. gout is the gradient at the projection
    // output (may be null), gfeat an extra gradient injected at the feature
    // tap (may be null). Parameter gradients accumulate in the layers.
    Volume<T> backward(const Tape& tape, const Volume<T>* gout, const Volume<T>* gfeat) {
        const int reducing = static_cast<int>(bns.size());
        Volume<T> g;
        if (gout) {
            g = convs[reducing].backward(tape.conv_in[reducing], *gout);
            if (gfeat) kernels::accumulate(g.size(), gfeat->data.data(), g.data.data());
        } else if (gfeat) {
            g = *gfeat;
        } else {
            throw std::invalid_argument("encoder backward: no gradient source");
        }
        for (int i = reducing - 1; i >= 0; --i) {
            g = leaky_relu_backward(tape.act_in[i], slope, g);
            g = bns[i].backward(tape.bn[i], g);
            g = convs[i].backward(tape.conv_in[i], g);
        }
        return g;
    }
};

// ---------------------------------------------------------------------------
// Decoder tower: mirror of the encoder. A valid 4x4x4 transposed conv lifts
// the latent to side 4, stride-2 transposed convs double the side per level,
// BN + ReLU everywhere except the final level, which maps to the output
// channel count and squashes through a sigmoid into [0, 1].
// ---------------------------------------------------------------------------
template <typename T>
struct DecoderTower {
    int latent_len = 0;
    int output_side = 0;
    std::vector<ConvT3d<T>> convs;
    std::vector<BatchNorm3d<T>> bns;  // levels 0 .. L-2

    struct Tape {
        std::vector<Volume<T>> conv_in;
        std::vector<Volume<T>> act_in;
        std::vector<typename BatchNorm3d<T>::Ctx> bn;
        Volume<T> sig_out;
    };

    void configure(const ArchConfig& arch, int out_ch) {
        arch.validate();
        latent_len = arch.latent_n;
        output_side = arch.input_size;
        const int reducing = arch.reducing_levels();
        convs.clear();
        bns.clear();
        convs.resize(reducing + 1);
        bns.resize(reducing);
        int ci = arch.latent_n;
        int co = arch.base_channels << (reducing - 1);
        convs[0].init_shape(4, 1, 0, ci, co);
        bns[0].init_shape(co, static_cast<T>(arch.bn_momentum),
                          static_cast<T>(arch.bn_eps));
        ci = co;
        for (int j = 1; j <= reducing; ++j) {
            co = (j == reducing) ? out_ch : (arch.base_channels << (reducing - 1 - j));
            convs[j].init_shape(4, 2, 1, ci, co);
            if (j < reducing)
                bns[j].init_shape(co, static_cast<T>(arch.bn_momentum),
                                  static_cast<T>(arch.bn_eps));
            ci = co;
        }
    }

    void check_input(const Volume<T>& z) const {
        if (z.f != 1 || z.h != 1 || z.w != 1 || z.c != latent_len)
            throw dim_mismatch_error("decoder: latent must be 1x1x1x" +
                                     std::to_string(latent_len));
    }

    Volume<T> forward_train(const Volume<T>& z, Tape* tape) {
        check_input(z);
        const int levels = static_cast<int>(convs.size());
        if (tape) {
            tape->conv_in.clear();
            tape->act_in.clear();
            tape->bn.assign(bns.size(), {});
        }
        Volume<T> cur = z;
        for (int i = 0; i < levels; ++i) {
            if (tape) tape->conv_in.push_back(cur);
            Volume<T> v = convs[i].forward(cur);
            if (i < static_cast<int>(bns.size())) {
                typename BatchNorm3d<T>::Ctx local;
                typename BatchNorm3d<T>::Ctx& ctx = tape ? tape->bn[i] : local;
                Volume<T> pre = bns[i].forward_train(v, ctx);
                if (tape) tape->act_in.push_back(pre);
                cur = leaky_relu_forward(pre, T(0));  // ReLU
            } else {
                cur = sigmoid_forward(v);
            }
        }
        if (tape) tape->sig_out = cur;
        return cur;
    }

    Volume<T> forward_eval(const Volume<T>& z) const {
        check_input(z);
        const int levels = static_cast<int>(convs.size());
        Volume<T> cur = z;
        for (int i = 0; i < levels; ++i) {
            Volume<T> v = convs[i].forward(cur);
            if (i < static_cast<int>(bns.size())) {
                cur = leaky_relu_forward(bns[i].forward_eval(v), T(0));
            } else {
                cur = sigmoid_forward(v);
            }
        }
        return cur;
    }

    Volume<T> backward(const Tape& tape, const Volume<T>& gout) {
        const int levels = static_cast<int>(convs.size());
        Volume<T> g = sigmoid_backward(tape.sig_out, gout);
        g = convs[levels - 1].backward(tape.conv_in[levels - 1], g);
        for (int i = levels - 2; i >= 0; --i) {
            g = leaky_relu_backward(tape.act_in[i], T(0), g);
            g = bns[i].backward(tape.bn[i], g);
            g = convs[i].backward(tape.conv_in[i], g);
        }
        return g;
    }
};

// ---------------------------------------------------------------------------
// The three-network generator and the discriminator.
// ---------------------------------------------------------------------------
template <typename T>
struct Generator {
    ArchConfig arch;
    EncoderTower<T> enc1, enc2;
    DecoderTower<T> dec;
};

template <typename T>
struct Discriminator {
    ArchConfig arch;
    EncoderTower<T> tower;  // projection outputs the single realness logit
};

// Named view over one parameter or buffer tensor.
template <typename T>
struct ParamRef {
    std::string name;
    std::vector<T>* value;
    std::vector<T>* grad;  // null for buffers
    std::vector<int> dims;
    bool learnable;
};

template <typename T>
void collect_params(EncoderTower<T>& t, const std::string& prefix,
                    std::vector<ParamRef<T>>& out) {
    const int levels = static_cast<int>(t.convs.size());
    for (int i = 0; i < levels; ++i) {
        auto& cv = t.convs[i];
        const std::string lp = prefix + ".l" + std::to_string(i);
        out.push_back({lp + ".conv.w", &cv.w, &cv.gw,
                       {cv.k, cv.k, cv.k, cv.ci, cv.co}, true});
        out.push_back({lp + ".conv.b", &cv.bias, &cv.gb, {cv.co}, true});
        if (i < static_cast<int>(t.bns.size())) {
            auto& bn = t.bns[i];
            out.push_back({lp + ".bn.gamma", &bn.gamma, &bn.ggamma, {bn.c}, true});
            out.push_back({lp + ".bn.beta", &bn.beta, &bn.gbeta, {bn.c}, true});
            out.push_back({lp + ".bn.running_mean", &bn.running_mean, nullptr,
                           {bn.c}, false});
            out.push_back({lp + ".bn.running_var", &bn.running_var, nullptr,
                           {bn.c}, false});
        }
    }
}

template <typename T>
void collect_params(DecoderTower<T>& t, const std::string& prefix,
                    std::vector<ParamRef<T>>& out) {
    const int levels = static_cast<int>(t.convs.size());
    for (int i = 0; i < levels; ++i) {
        auto& cv = t.convs[i];
        const std::string lp = prefix + ".l" + std::to_string(i);
        out.push_back({lp + ".conv.w", &cv.w, &cv.gw,
                       {cv.k, cv.k, cv.k, cv.ci, cv.co}, true});
        out.push_back({lp + ".conv.b", &cv.bias, &cv.gb, {cv.co}, true});
        if (i < static_cast<int>(t.bns.size())) {
            auto& bn = t.bns[i];
            out.push_back({lp + ".bn.gamma", &bn.gamma, &bn.ggamma, {bn.c}, true});
            out.push_back({lp + ".bn.beta", &bn.beta, &bn.gbeta, {bn.c}, true});
            out.push_back({lp + ".bn.running_mean", &bn.running_mean, nullptr,
                           {bn.c}, false});
            out.push_back({lp + ".bn.running_var", &bn.running_var, nullptr,
                           {bn.c}, false});
        }
    }
}

template <typename T>
std::vector<ParamRef<T>> collect_params(Generator<T>& g) {
    std::vector<ParamRef<T>> out;
    collect_params(g.enc1, "gen.enc1", out);
    collect_params(g.dec, "gen.dec", out);
    collect_params(g.enc2, "gen.enc2", out);
    return out;
}

template <typename T>
std::vector<ParamRef<T>> collect_params(Discriminator<T>& d) {
    std::vector<ParamRef<T>> out;
    collect_params(d.tower, "disc", out);
    return out;
}

template <typename T>
void zero_grads(std::vector<ParamRef<T>>& params) {
    for (auto& p : params)
        if (p.grad) std::fill(p.grad->begin(), p.grad->end(), T(0));
}

namespace detail {

// Conv weights ~ Normal(0, 0.02) on per-tensor seed streams; biases and BN
// affine/buffers keep their configure-time defaults.
template <typename T>
void init_weights(std::vector<ParamRef<T>>& params, std::uint64_t seed) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& p = params[i];
        if (!p.learnable) continue;
        if (p.name.size() >= 7 &&
            p.name.compare(p.name.size() - 7, 7, ".conv.w") == 0) {
            Rng rng(derive_seed(seed, i));
            for (T& v : *p.value) v = static_cast<T>(rng.normal(0.0, 0.02));
        }
    }
}

}  // namespace detail

template <typename T>
Generator<T> init_generator(const ArchConfig& arch, std::uint64_t seed) {
    arch.validate();
    Generator<T> g;
    g.arch = arch;
    g.enc1.configure(arch, 1, arch.latent_n);
    g.dec.configure(arch, 1);
    g.enc2.configure(arch, 1, arch.latent_n);
    auto params = collect_params(g);
    detail::init_weights(params, derive_seed(seed, 0x67656e));
    return g;
}

template <typename T>
Discriminator<T> init_discriminator(const ArchConfig& arch, std::uint64_t seed) {
    arch.validate();
    Discriminator<T> d;
    d.arch = arch;
    d.tower.configure(arch, 1, 1);
    auto params = collect_params(d);
    detail::init_weights(params, derive_seed(seed, 0x646973));
    return d;
}

// ---------------------------------------------------------------------------
// Clip <-> volume plumbing and the single-clip model operations.
// ---------------------------------------------------------------------------
template <typename T>
Volume<T> clip_to_volume(const VideoClip& clip) {
    Volume<T> v(1, clip.f, clip.h, clip.w, clip.c);
    for (std::size_t i = 0; i < clip.data.size(); ++i)
        v.data[i] = static_cast<T>(clip.data[i]);
    return v;
}

template <typename T>
VideoClip volume_to_clip(const Volume<T>& v, int batch_index = 0) {
    VideoClip clip(v.f, v.h, v.w, v.c);
    const std::size_t per = clip.data.size();
    for (std::size_t i = 0; i < per; ++i)
        clip.data[i] = static_cast<float>(v.data[batch_index * per + i]);
    return clip;
}

template <typename T>
std::vector<T> flatten_batch_item(const Volume<T>& v, int batch_index = 0) {
    const std::size_t per = v.size() / static_cast<std::size_t>(v.b);
    return std::vector<T>(v.data.begin() + batch_index * per,
                          v.data.begin() + (batch_index + 1) * per);
}

template <typename T>
Embedding<T> encode(EncoderTower<T>& enc, const VideoClip& x, Mode mode,
                    EmbeddingKind kind = EmbeddingKind::z_g) {
    const Volume<T> v = clip_to_volume<T>(x);
    auto r = mode == Mode::train ? enc.forward_train(v, nullptr)
                                 : static_cast<const EncoderTower<T>&>(enc).forward_eval(v);
    return Embedding<T>{kind, flatten_batch_item(r.out)};
}

template <typename T>
VideoClip decode(DecoderTower<T>& dec, const Embedding<T>& z, Mode mode) {
    if (static_cast<int>(z.values.size()) != dec.latent_len)
        throw dim_mismatch_error("decode: latent length mismatch");
    Volume<T> zv(1, 1, 1, 1, dec.latent_len);
    zv.data = z.values;
    Volume<T> out = mode == Mode::train
                        ? dec.forward_train(zv, nullptr)
                        : static_cast<const DecoderTower<T>&>(dec).forward_eval(zv);
    return volume_to_clip(out);
}

template <typename T>
struct GeneratorForwardResult {
    VideoClip reconstruction;
    Embedding<T> z_g, z_g_prime;
};

template <typename T>
GeneratorForwardResult<T> generator_forward(Generator<T>& gen, const VideoClip& x,
                                            Mode mode) {
    const Volume<T> xv = clip_to_volume<T>(x);
    Volume<T> z, xr, zp;
    if (mode == Mode::train) {
        z = gen.enc1.forward_train(xv, nullptr).out;
        xr = gen.dec.forward_train(z, nullptr);
        zp = gen.enc2.forward_train(xr, nullptr).out;
    } else {
        const Generator<T>& cg = gen;
        z = cg.enc1.forward_eval(xv).out;
        xr = cg.dec.forward_eval(z);
        zp = cg.enc2.forward_eval(xr).out;
    }
    GeneratorForwardResult<T> r;
    r.reconstruction = volume_to_clip(xr);
    r.z_g = {EmbeddingKind::z_g, flatten_batch_item(z)};
    r.z_g_prime = {EmbeddingKind::z_g_prime, flatten_batch_item(zp)};
    return r;
}

template <typename T>
struct DiscriminateResult {
    T realness;  // sigmoid of the logit, strictly in (0, 1)
    Embedding<T> z_d;
};

template <typename T>
DiscriminateResult<T> discriminate(Discriminator<T>& disc, const VideoClip& x,
                                   Mode mode) {
    const Volume<T> xv = clip_to_volume<T>(x);
    auto r = mode == Mode::train
                 ? disc.tower.forward_train(xv, nullptr)
                 : static_cast<const EncoderTower<T>&>(disc.tower).forward_eval(xv);
    const Volume<T> y = sigmoid_forward(r.out);
    DiscriminateResult<T> d;
    d.realness = y.data[0];
    d.z_d = {EmbeddingKind::z_d, flatten_batch_item(r.feat)};
    return d;
}

using GeneratorF = Generator<float>;
using DiscriminatorF = Discriminator<float>;

}  // namespace anomgait
