#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "anomgait/video.hpp"

namespace anomgait {

// Clips render at a fixed frame rate; stride_freq is interpreted against it.
constexpr double kSynthFps = 30.0;

// Deterministic synthetic walker: a bipedal ellipse/capsule silhouette
// translating horizontally, limbs swinging sinusoidally at stride_freq,
// torso bobbing at the same frequency, plus optional per-frame tremor
// jitter and Gaussian intensity noise clamped to [0, 1]. The stride
// frequency is raised to fps/f when needed so every clip covers at least
// one full gait cycle. Output is single-channel.
VideoClip generate_clip(const GaitParams& params, int f, int h, int w,
                        std::uint64_t seed);

// Uniform sampling range for one gait parameter.
struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
};

struct GaitParamRanges {
    ParamRange stride_freq{1.0, 1.0};
    ParamRange amplitude{6.0, 6.0};
    ParamRange tremor_sigma{0.0, 0.0};
    ParamRange walker_speed{0.4, 0.4};
    ParamRange silhouette_scale{0.7, 0.7};
    ParamRange bg_level{0.1, 0.1};
    ParamRange fg_level{0.9, 0.9};
    ParamRange noise_sigma{0.01, 0.01};
};

struct ClassSpec {
    std::string label;
    std::string stage_label;
    int subjects = 1;
    int clips_per_subject = 1;
    GaitParamRanges ranges;
};

struct CorpusSpec {
    int f = 64, h = 64, w = 64;
    std::uint64_t seed = 0;
    std::vector<ClassSpec> classes;
};

// Draws per-subject parameters from each class's ranges on seed-derived
// streams, renders every clip, writes GVT files under out_dir/clips/ and
// the manifest to out_dir/manifest.json. Returns the manifest (base_dir
// set to out_dir).
DatasetManifest generate_corpus(const CorpusSpec& spec, const std::string& out_dir);

// Corpus spec JSON reader for the CLI (schema in the README).
CorpusSpec parse_corpus_spec_file(const std::string& path);

}  // namespace anomgait
