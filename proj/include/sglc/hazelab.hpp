#pragma once

#include <cstdint>
#include <vector>

#include "sglc/image.hpp"

namespace sglc {

/// Forward scattering model parameters. Transmission is derived as
/// t(x) = exp(-beta * depth(x)), so depth units only matter relative to
/// beta. Atmospheric light is per-channel constant by default; a per-pixel
/// light map (same shape as the target image) may override it.
struct HazeField {
    float beta = 1.0f;                    // scattering strength, >= 0
    ImageBuffer depth;                    // single channel, >= 0
    std::vector<float> atmospheric_light; // one value per target channel, in [0,1]
    ImageBuffer light_map;                // optional per-pixel override (empty = unused)
};

/// t = exp(-beta * depth), single channel. Depth must match the requested
/// dimensions.
ImageBuffer transmission(const HazeField& field, int height, int width);

/// hazy = t*clean + (1-t)*A, pointwise. Keeps [0,1] when inputs are in it.
ImageBuffer synthesize_haze(const ImageBuffer& clean, const HazeField& field);

/// Deterministic multi-octave value-noise field normalized to [0,1];
/// octaves == 0 yields a constant map. Dimensions must be at least 8x8.
ImageBuffer smooth_depth_map(int height, int width, std::uint64_t seed, int octaves);

/// Self-supervised corruption: seeded axis-aligned squares filled with a
/// constant (white by default, imitating dense haze patches).
struct CorruptionSpec {
    int square_count = 8;
    int side_min = 8;
    int side_max = 32;
    float fill = 1.0f;
    std::uint64_t seed = 0;
};

struct CorruptionResult {
    ImageBuffer image; // squares overwritten with spec.fill
    ImageBuffer mask;  // single channel, 1 inside squares, 0 elsewhere
};

/// Squares lie fully inside the image; pixels outside every square are
/// bit-unchanged. Draw order per square: side, then x0, then y0, from
/// SplitMix64(spec.seed).
CorruptionResult corrupt_white_squares(const ImageBuffer& clean,
                                       const CorruptionSpec& spec);

} // namespace sglc
