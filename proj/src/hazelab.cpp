#include "sglc/hazelab.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sglc/kernels.hpp"
#include "sglc/rng.hpp"

namespace sglc {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

double lattice_value(std::uint64_t seed, int octave, int gx, int gy) {
    std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(octave) + 1);
    h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::uint32_t>(gx)));
    h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::uint32_t>(gy)));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Per-channel atmospheric light for row y, expanded to one sample per entry.
void fill_light_row(const HazeField& field, int y, int width, int channels,
                    std::vector<float>& row) {
    if (!field.light_map.empty()) {
        const float* src = field.light_map.row(y);
        std::copy(src, src + static_cast<std::size_t>(width) * channels, row.begin());
        return;
    }
    for (int x = 0; x < width; ++x)
        for (int c = 0; c < channels; ++c)
            row[static_cast<std::size_t>(x) * channels + c] = field.atmospheric_light[c];
}

void validate_field(const HazeField& field, int height, int width, int channels) {
    require(field.beta >= 0.0f, "haze field: beta must be >= 0");
    require(!field.depth.empty(), "haze field: missing depth map");
    require(field.depth.channels() == 1, "haze field: depth map must be single channel");
    require(field.depth.height() == height && field.depth.width() == width,
            "haze field: depth map dimensions mismatch");
    for (std::size_t i = 0; i < field.depth.sample_count(); ++i)
        require(field.depth.data()[i] >= 0.0f, "haze field: depth must be >= 0");
    if (channels > 0) {
        if (field.light_map.empty()) {
            require(static_cast<int>(field.atmospheric_light.size()) == channels,
                    "haze field: atmospheric light entries must match channels");
            for (float a : field.atmospheric_light)
                require(a >= 0.0f && a <= 1.0f,
                        "haze field: atmospheric light must be in [0,1]");
        } else {
            require(field.light_map.height() == height &&
                        field.light_map.width() == width &&
                        field.light_map.channels() == channels,
                    "haze field: light map dimensions mismatch");
        }
    }
}

} // namespace

ImageBuffer transmission(const HazeField& field, int height, int width) {
    validate_field(field, height, width, 0);
    ImageBuffer t(height, width, 1);
    const double beta = static_cast<double>(field.beta);
    const float* d = field.depth.data();
    float* out = t.data();
    for (std::size_t i = 0; i < t.sample_count(); ++i)
        out[i] = static_cast<float>(std::exp(-beta * static_cast<double>(d[i])));
    return t;
}

ImageBuffer synthesize_haze(const ImageBuffer& clean, const HazeField& field) {
    require(!clean.empty(), "synthesize_haze: empty image");
    validate_field(field, clean.height(), clean.width(), clean.channels());

    const ImageBuffer t = transmission(field, clean.height(), clean.width());
    const int w = clean.width();
    const int c = clean.channels();
    const auto& kern = kernels::active();

    ImageBuffer out(clean.height(), w, c);
    std::vector<float> trans_row(static_cast<std::size_t>(w) * c);
    std::vector<float> light_row(static_cast<std::size_t>(w) * c);
    for (int y = 0; y < clean.height(); ++y) {
        const float* trow = t.row(y);
        for (int x = 0; x < w; ++x)
            for (int ch = 0; ch < c; ++ch)
                trans_row[static_cast<std::size_t>(x) * c + ch] = trow[x];
        fill_light_row(field, y, w, c, light_row);
        kern.haze_blend(out.row(y), clean.row(y), trans_row.data(), light_row.data(),
                        static_cast<std::size_t>(w) * c);
    }
    return out;
}

ImageBuffer smooth_depth_map(int height, int width, std::uint64_t seed, int octaves) {
    require(height >= 8 && width >= 8, "smooth_depth_map: dimensions must be >= 8");
    if (octaves <= 0) return ImageBuffer::constant(height, width, 1, 0.5f);

    std::vector<double> field(static_cast<std::size_t>(height) * width, 0.0);
    double amplitude = 1.0;
    for (int o = 0; o < octaves; ++o) {
        const int cells = 4 << o; // lattice cells per axis at this octave
        for (int y = 0; y < height; ++y) {
            const double fy = height > 1
                                  ? static_cast<double>(y) / (height - 1) * cells
                                  : 0.0;
            const int gy = std::min(static_cast<int>(fy), cells - 1);
            const double ty = smoothstep(fy - gy);
            for (int x = 0; x < width; ++x) {
                const double fx = width > 1
                                      ? static_cast<double>(x) / (width - 1) * cells
                                      : 0.0;
                const int gx = std::min(static_cast<int>(fx), cells - 1);
                const double tx = smoothstep(fx - gx);
                const double v00 = lattice_value(seed, o, gx, gy);
                const double v10 = lattice_value(seed, o, gx + 1, gy);
                const double v01 = lattice_value(seed, o, gx, gy + 1);
                const double v11 = lattice_value(seed, o, gx + 1, gy + 1);
                const double top = v00 + (v10 - v00) * tx;
                const double bottom = v01 + (v11 - v01) * tx;
                field[static_cast<std::size_t>(y) * width + x] +=
                    amplitude * (top + (bottom - top) * ty);
            }
        }
        amplitude *= 0.5;
    }

    double lo = field[0];
    double hi = field[0];
    for (double v : field) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    ImageBuffer out(height, width, 1);
    const double range = hi - lo;
    for (std::size_t i = 0; i < field.size(); ++i)
        out.data()[i] = range > 0.0
                            ? static_cast<float>((field[i] - lo) / range)
                            : 0.5f;
    return out;
}

CorruptionResult corrupt_white_squares(const ImageBuffer& clean,
                                       const CorruptionSpec& spec) {
    require(!clean.empty(), "corrupt_white_squares: empty image");
    require(spec.square_count >= 0, "corrupt_white_squares: negative count");
    require(spec.fill >= 0.0f && spec.fill <= 1.0f,
            "corrupt_white_squares: fill must be in [0,1]");
    if (spec.square_count > 0) {
        require(spec.side_min >= 1 && spec.side_min <= spec.side_max,
                "corrupt_white_squares: invalid side range");
        require(spec.side_max < std::min(clean.height(), clean.width()),
                "corrupt_white_squares: side range exceeds image");
    }

    CorruptionResult result{clean, ImageBuffer(clean.height(), clean.width(), 1)};
    SplitMix64 rng(spec.seed);
    for (int s = 0; s < spec.square_count; ++s) {
        const int side =
            spec.side_min +
            static_cast<int>(rng.next_below(
                static_cast<std::uint32_t>(spec.side_max - spec.side_min + 1)));
        const int x0 = static_cast<int>(
            rng.next_below(static_cast<std::uint32_t>(clean.width() - side + 1)));
        const int y0 = static_cast<int>(
            rng.next_below(static_cast<std::uint32_t>(clean.height() - side + 1)));
        for (int y = y0; y < y0 + side; ++y) {
            for (int x = x0; x < x0 + side; ++x) {
                for (int c = 0; c < clean.channels(); ++c)
                    result.image.at(y, x, c) = spec.fill;
                result.mask.at(y, x, 0) = 1.0f;
            }
        }
    }
    return result;
}

} // namespace sglc
