#pragma once

#include <vector>

#include "sglc/image.hpp"

namespace sglc {

/// Tiling parameters for grid-strided patch extraction over a padded image.
/// rows (n_h) and cols (n_w) are the number of height/width divisions; they
/// double as the vertical/horizontal sampling strides, so every patch sees
/// equally spaced pixels spanning the whole image.
struct GridLayout {
    int patch_side = 0;    // G
    int rows = 0;          // n_h = padded_height / G
    int cols = 0;          // n_w = padded_width / G
    int padded_height = 0;
    int padded_width = 0;

    int patch_count() const { return rows * cols; } // N = n_h * n_w
};

/// Derives the layout; rejects dimensions not divisible by patch_side.
GridLayout make_grid_layout(int padded_height, int padded_width, int patch_side);

/// N patches of patch_side x patch_side x C, ordered row-major in offset
/// space: patch l carries offsets (l mod cols, l div cols).
struct GridPatchSet {
    GridLayout layout;
    std::vector<ImageBuffer> patches;
};

/// Patch l, local pixel (ix, iy) holds the image pixel at
///   x = (l mod cols) + ix*cols,  y = (l div cols) + iy*rows.
/// The map (l, ix, iy) -> (x, y) is a bijection onto the padded image, so
/// extraction is lossless and invertible.
GridPatchSet grid_extract(const ImageBuffer& img, const GridLayout& layout);

/// Exact inverse of grid_extract: scatters every patch pixel back to its
/// unique source position. Destinations are disjoint per patch, so patches
/// may be processed in any order (or concurrently) with identical results.
ImageBuffer grid_reconstruct(const GridPatchSet& set);

} // namespace sglc
