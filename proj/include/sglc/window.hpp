#pragma once

#include <vector>

#include "sglc/image.hpp"

namespace sglc {

/// Contiguous non-overlapping tiling: rows*cols tiles of side tile_side,
/// row-major, covering the padded image exactly.
struct WindowTileSet {
    int tile_side = 0;
    int rows = 0;
    int cols = 0;
    std::vector<ImageBuffer> tiles;
};

/// Tile (r, c) equals the sub-image [c*G, (c+1)*G) x [r*G, (r+1)*G).
/// Rejects dimensions not divisible by tile_side.
WindowTileSet window_extract(const ImageBuffer& img, int tile_side);

/// Pastes tiles back at their grid positions; exact inverse of
/// window_extract. This is the seam-prone baseline: tiles restored
/// independently meet at hard boundaries.
ImageBuffer window_reconstruct_naive(const WindowTileSet& set);

} // namespace sglc
