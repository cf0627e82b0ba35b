#pragma once

#include <stdexcept>
#include <string>

namespace anomgait {

// Network geometry shared by every tower. For cube side s the towers run
// L = log2(s) - 1 levels: L-1 stride-2 4x4x4 convolutions (pad 1, exact
// halving, channels doubling from base_channels) take the side down to 4,
// then one unpadded 4x4x4 projection collapses it to 1. The projection
// level is a bare convolution; reducing levels carry BatchNorm and the
// leaky/ReLU nonlinearity.
struct ArchConfig {
    int input_size = 64;    // cube side s, power of two >= 8
    int base_channels = 64; // c0
    int latent_n = 128;     // generator embedding length n
    double leaky_slope = 0.2;
    double bn_momentum = 0.1;
    double bn_eps = 1e-5;

    void validate() const {
        if (input_size < 8 || (input_size & (input_size - 1)) != 0)
            throw std::invalid_argument("arch: input_size must be a power of two >= 8");
        if (base_channels < 1) throw std::invalid_argument("arch: base_channels >= 1");
        if (latent_n < 1) throw std::invalid_argument("arch: latent_n >= 1");
        if (!(leaky_slope >= 0.0) || !(bn_momentum > 0.0) || !(bn_eps > 0.0))
            throw std::invalid_argument("arch: invalid hyperparameters");
    }

    int levels() const {
        int s = input_size, l = 0;
        while (s > 1) {
            s >>= 1;
            ++l;
        }
        return l - 1;  // log2(s) - 1
    }

    int reducing_levels() const { return levels() - 1; }

    // Output channels of reducing level i (0-based).
    int channels_after_level(int i) const { return base_channels << i; }

    // Channels feeding the final projection conv.
    int pre_latent_channels() const {
        return base_channels << (reducing_levels() - 1);
    }

    // Length m of the discriminator feature embedding (last hidden level,
    // side 4, flattened).
    int disc_feature_len() const { return 64 * pre_latent_channels(); }

    bool operator==(const ArchConfig& o) const {
        return input_size == o.input_size && base_channels == o.base_channels &&
               latent_n == o.latent_n && leaky_slope == o.leaky_slope &&
               bn_momentum == o.bn_momentum && bn_eps == o.bn_eps;
    }
};

}  // namespace anomgait
