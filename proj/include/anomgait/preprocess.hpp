#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anomgait/video.hpp"

namespace anomgait {

// Canonicalizes a raw clip: optional channel-mean grayscale collapse,
// bilinear spatial resize to target_h x target_w, temporal subsampling by
// uniform stride floor(raw.f / target_f) followed by a head crop to exactly
// target_f frames, then per-clip min-max normalization to [0, 1] (constant
// clips map to all zeros). Throws std::invalid_argument("too few frames")
// when raw.f < target_f.
VideoClip preprocess(const VideoClip& raw, int target_f, int target_h, int target_w,
                     bool gray);

struct SplitFraction {
    std::string name;
    double fraction = 0.0;
};

// Assigns group_label per clip at subject granularity: every clip of a
// subject lands in the same split. Fractions must sum to 1 (1e-9 slack) and
// split sizes are apportioned per class by largest remainder with at least
// one subject per split. Throws when any class has fewer subjects than
// splits. Deterministic under seed.
DatasetManifest partition(const DatasetManifest& manifest,
                          const std::vector<SplitFraction>& splits, std::uint64_t seed);

}  // namespace anomgait
