#pragma once

#include <cmath>
#include <cstring>
#include <vector>

#include "sglc/hazelab.hpp"
#include "sglc/image.hpp"
#include "sglc/rng.hpp"

namespace sglc::test {

inline ImageBuffer random_image(int h, int w, int c, std::uint64_t seed) {
    ImageBuffer img(h, w, c);
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < img.sample_count(); ++i)
        img.data()[i] = static_cast<float>(rng.next_double());
    return img;
}

/// Natural-image stand-in: per-channel multi-octave value noise.
inline ImageBuffer smooth_image(int h, int w, int c, std::uint64_t seed) {
    ImageBuffer img(h, w, c);
    for (int ch = 0; ch < c; ++ch) {
        const ImageBuffer plane = smooth_depth_map(h, w, seed + ch, 3);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                img.at(y, x, ch) = plane.at(y, x, 0);
    }
    return img;
}

inline bool bit_equal(const ImageBuffer& a, const ImageBuffer& b) {
    return a.same_shape(b) &&
           std::memcmp(a.data(), b.data(), a.sample_count() * sizeof(float)) == 0;
}

inline double max_abs_diff(const ImageBuffer& a, const ImageBuffer& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.sample_count(); ++i)
        m = std::max(m, std::abs(static_cast<double>(a.data()[i]) -
                                 static_cast<double>(b.data()[i])));
    return m;
}

} // namespace sglc::test
