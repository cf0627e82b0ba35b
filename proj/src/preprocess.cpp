#include "anomgait/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "anomgait/rng.hpp"

namespace anomgait {

namespace {

// Bilinear sample with half-pixel centers (src = (dst + 0.5) * scale - 0.5),
// which degenerates to the identity when the sizes match.
float bilinear_at(const VideoClip& c, int t, double sy, double sx, int ch) {
    const int y0 = static_cast<int>(std::floor(sy));
    const int x0 = static_cast<int>(std::floor(sx));
    const double fy = sy - y0;
    const double fx = sx - x0;
    const auto clampy = [&](int y) { return std::clamp(y, 0, c.h - 1); };
    const auto clampx = [&](int x) { return std::clamp(x, 0, c.w - 1); };
    const double v00 = c.at(t, clampy(y0), clampx(x0), ch);
    const double v01 = c.at(t, clampy(y0), clampx(x0 + 1), ch);
    const double v10 = c.at(t, clampy(y0 + 1), clampx(x0), ch);
    const double v11 = c.at(t, clampy(y0 + 1), clampx(x0 + 1), ch);
    const double top = v00 + fx * (v01 - v00);
    const double bot = v10 + fx * (v11 - v10);
    return static_cast<float>(top + fy * (bot - top));
}

}  // namespace

VideoClip preprocess(const VideoClip& raw, int target_f, int target_h, int target_w,
                     bool gray) {
    if (!raw.valid()) throw std::invalid_argument("preprocess: invalid input clip");
    if (target_f < 1 || target_h < 1 || target_w < 1)
        throw std::invalid_argument("preprocess: invalid target dims");
    if (raw.f < target_f) throw std::invalid_argument("preprocess: too few frames");

    // Channel collapse first so the resize touches one channel.
    const VideoClip* src = &raw;
    VideoClip grayed;
    if (gray && raw.c > 1) {
        grayed = VideoClip(raw.f, raw.h, raw.w, 1);
        const float inv = 1.0f / raw.c;
        for (int t = 0; t < raw.f; ++t)
            for (int y = 0; y < raw.h; ++y)
                for (int x = 0; x < raw.w; ++x) {
                    float acc = 0.0f;
                    for (int ch = 0; ch < raw.c; ++ch) acc += raw.at(t, y, x, ch);
                    grayed.at(t, y, x, 0) = acc * inv;
                }
        src = &grayed;
    }
    const int channels = src->c;

    const int stride = std::max(1, raw.f / target_f);
    const double sy_scale = static_cast<double>(src->h) / target_h;
    const double sx_scale = static_cast<double>(src->w) / target_w;

    VideoClip out(target_f, target_h, target_w, channels);
    const bool same_spatial = src->h == target_h && src->w == target_w;
    for (int t = 0; t < target_f; ++t) {
        const int ts = t * stride;
        for (int y = 0; y < target_h; ++y) {
            const double sy = same_spatial ? y : (y + 0.5) * sy_scale - 0.5;
            for (int x = 0; x < target_w; ++x) {
                const double sx = same_spatial ? x : (x + 0.5) * sx_scale - 0.5;
                for (int ch = 0; ch < channels; ++ch) {
                    out.at(t, y, x, ch) =
                        same_spatial ? src->at(ts, y, x, ch)
                                     : bilinear_at(*src, ts, sy, sx, ch);
                }
            }
        }
    }

    // Per-clip min-max; a zero-range clip normalizes to all zeros.
    float lo = out.data[0], hi = out.data[0];
    for (float v : out.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const float range = hi - lo;
    if (range > 0.0f) {
        // Divide rather than multiply by the reciprocal so the max lands on
        // exactly 1.0 and the [0,1] invariant holds.
        for (float& v : out.data) v = (v - lo) / range;
    } else {
        std::fill(out.data.begin(), out.data.end(), 0.0f);
    }
    return out;
}

DatasetManifest partition(const DatasetManifest& manifest,
                          const std::vector<SplitFraction>& splits, std::uint64_t seed) {
    if (splits.empty()) throw std::invalid_argument("partition: no splits given");
    double total = 0.0;
    for (const auto& s : splits) {
        if (s.name.empty()) throw std::invalid_argument("partition: empty split name");
        if (s.fraction < 0.0) throw std::invalid_argument("partition: negative fraction");
        total += s.fraction;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("partition: fractions must sum to 1");

    // Subjects per class, in first-appearance order for determinism.
    std::vector<std::string> class_order;
    std::map<std::string, std::vector<std::string>> class_subjects;
    for (const auto& e : manifest.entries) {
        auto& subjects = class_subjects[e.meta.class_label];
        if (subjects.empty() &&
            std::find(class_order.begin(), class_order.end(), e.meta.class_label) ==
                class_order.end())
            class_order.push_back(e.meta.class_label);
        if (std::find(subjects.begin(), subjects.end(), e.meta.subject_id) ==
            subjects.end())
            subjects.push_back(e.meta.subject_id);
    }

    std::map<std::string, std::string> subject_split;
    for (std::size_t ci = 0; ci < class_order.size(); ++ci) {
        auto subjects = class_subjects[class_order[ci]];
        const std::size_t n = subjects.size();
        if (n < splits.size())
            throw std::invalid_argument("partition: class '" + class_order[ci] +
                                        "' has fewer subjects than splits");

        Rng rng(derive_seed(seed, 0x70617274 + ci));
        rng.shuffle(subjects);

        // Largest-remainder apportionment, then guarantee one per split.
        std::vector<std::size_t> counts(splits.size());
        std::vector<std::pair<double, std::size_t>> remainders;
        std::size_t assigned = 0;
        for (std::size_t si = 0; si < splits.size(); ++si) {
            const double exact = splits[si].fraction * static_cast<double>(n);
            counts[si] = static_cast<std::size_t>(std::floor(exact + 1e-9));
            assigned += counts[si];
            remainders.push_back({exact - std::floor(exact + 1e-9), si});
        }
        std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t r = 0; assigned < n; ++r, ++assigned)
            counts[remainders[r % remainders.size()].second]++;
        for (std::size_t si = 0; si < splits.size(); ++si) {
            while (counts[si] == 0) {
                auto big = std::max_element(counts.begin(), counts.end());
                --*big;
                ++counts[si];
            }
        }

        std::size_t idx = 0;
        for (std::size_t si = 0; si < splits.size(); ++si)
            for (std::size_t k = 0; k < counts[si]; ++k)
                subject_split[subjects[idx++]] = splits[si].name;
    }

    DatasetManifest out = manifest;
    for (auto& e : out.entries) e.meta.group_label = subject_split[e.meta.subject_id];
    return out;
}

}  // namespace anomgait
