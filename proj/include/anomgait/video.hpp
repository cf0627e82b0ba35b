#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace anomgait {

// One clip: frames x height x width x channels of finite 32-bit floats,
// frame-major then row-major then channel. After preprocessing all values
// lie in [0, 1].
struct VideoClip {
    int f = 0, h = 0, w = 0, c = 0;
    std::vector<float> data;

    VideoClip() = default;
    VideoClip(int f_, int h_, int w_, int c_)
        : f(f_), h(h_), w(w_), c(c_),
          data(static_cast<std::size_t>(f_) * h_ * w_ * c_, 0.0f) {}

    std::size_t index(int ff, int hh, int ww, int cc) const {
        return (((static_cast<std::size_t>(ff) * h + hh) * w + ww) * c) + cc;
    }
    float& at(int ff, int hh, int ww, int cc) { return data[index(ff, hh, ww, cc)]; }
    float at(int ff, int hh, int ww, int cc) const { return data[index(ff, hh, ww, cc)]; }

    bool valid() const {
        return f >= 1 && h >= 1 && w >= 1 && c >= 1 &&
               data.size() == static_cast<std::size_t>(f) * h * w * c;
    }
};

// Synthetic walker controls. Units: stride_freq in gait cycles per second
// (clips render at a fixed 30 fps), amplitude/tremor_sigma/walker_speed in
// pixels, intensities in [0, 1].
struct GaitParams {
    double stride_freq = 1.0;
    double amplitude = 6.0;
    double tremor_sigma = 0.0;
    double walker_speed = 0.4;
    double silhouette_scale = 0.7;
    double bg_level = 0.1;
    double fg_level = 0.9;
    double noise_sigma = 0.01;
};

struct ClipMeta {
    std::string clip_id;
    std::string subject_id;
    std::string class_label;
    std::string group_label;
    std::string stage_label;
};

// Preprocessing provenance recorded alongside a dataset.
struct PreprocessRecord {
    int target_f = 0, target_h = 0, target_w = 0;
    bool gray = false;
    int subsample_stride = 1;
    std::string normalization = "minmax";
};

struct ManifestEntry {
    std::string path;  // stored relative to the manifest file
    ClipMeta meta;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    PreprocessRecord preprocessing;
    std::string base_dir;  // set on load; entry paths resolve against it

    std::string resolve(const ManifestEntry& e) const {
        if (base_dir.empty()) return e.path;
        return base_dir + "/" + e.path;
    }
};

// Manifest JSON round-trip (schema in the README).
void save_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

}  // namespace anomgait
