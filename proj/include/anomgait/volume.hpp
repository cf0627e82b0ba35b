#pragma once

#include <cstddef>
#include <vector>

#include "anomgait/errors.hpp"

namespace anomgait {

// Batched 4-D volume: [batch][frames][height][width][channels], contiguous
// with channels fastest. All layer math runs on this layout; the per-clip
// VideoClip type in video.hpp is the b == 1 case without batch bookkeeping.
template <typename T>
struct Volume {
    int b = 0, f = 0, h = 0, w = 0, c = 0;
    std::vector<T> data;

    Volume() = default;
    Volume(int b_, int f_, int h_, int w_, int c_)
        : b(b_), f(f_), h(h_), w(w_), c(c_),
          data(static_cast<std::size_t>(b_) * f_ * h_ * w_ * c_, T(0)) {}

    std::size_t size() const { return data.size(); }
    std::size_t voxels() const { return static_cast<std::size_t>(b) * f * h * w; }

    std::size_t offset(int bb, int ff, int hh, int ww) const {
        return ((((static_cast<std::size_t>(bb) * f + ff) * h + hh) * w + ww)) * c;
    }

    T* at(int bb, int ff, int hh, int ww) { return data.data() + offset(bb, ff, hh, ww); }
    const T* at(int bb, int ff, int hh, int ww) const {
        return data.data() + offset(bb, ff, hh, ww);
    }

    bool same_shape(const Volume& o) const {
        return b == o.b && f == o.f && h == o.h && w == o.w && c == o.c;
    }
};

template <typename T>
inline void require_same_shape(const Volume<T>& a, const Volume<T>& b, const char* what) {
    if (!a.same_shape(b)) throw dim_mismatch_error(what);
}

}  // namespace anomgait
