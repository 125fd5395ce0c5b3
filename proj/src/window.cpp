#include "sglc/window.hpp"

#include <cstring>
#include <stdexcept>

#include "sglc/parallel.hpp"

namespace sglc {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

} // namespace

WindowTileSet window_extract(const ImageBuffer& img, int tile_side) {
    require(!img.empty(), "window_extract: empty image");
    require(tile_side >= 1, "window_extract: tile side must be >= 1");
    require(img.height() % tile_side == 0 && img.width() % tile_side == 0,
            "window_extract: dimensions not divisible by tile side");

    WindowTileSet set;
    set.tile_side = tile_side;
    set.rows = img.height() / tile_side;
    set.cols = img.width() / tile_side;
    set.tiles.resize(static_cast<std::size_t>(set.rows) * set.cols);

    const int c = img.channels();
    const std::size_t row_bytes = static_cast<std::size_t>(tile_side) * c * sizeof(float);
    parallel_for(set.tiles.size(), [&](std::size_t i) {
        const int r = static_cast<int>(i) / set.cols;
        const int col = static_cast<int>(i) % set.cols;
        ImageBuffer tile(tile_side, tile_side, c);
        for (int y = 0; y < tile_side; ++y)
            std::memcpy(tile.row(y),
                        img.row(r * tile_side + y) +
                            static_cast<std::size_t>(col) * tile_side * c,
                        row_bytes);
        set.tiles[i] = std::move(tile);
    });
    return set;
}

ImageBuffer window_reconstruct_naive(const WindowTileSet& set) {
    require(set.rows >= 1 && set.cols >= 1 && set.tile_side >= 1,
            "window_reconstruct_naive: invalid tile set");
    require(set.tiles.size() == static_cast<std::size_t>(set.rows) * set.cols,
            "window_reconstruct_naive: tile count does not match grid");
    const int side = set.tile_side;
    const int c = set.tiles[0].channels();
    for (const ImageBuffer& t : set.tiles)
        require(t.height() == side && t.width() == side && t.channels() == c,
                "window_reconstruct_naive: tile shape mismatch");

    ImageBuffer out(set.rows * side, set.cols * side, c);
    const std::size_t row_bytes = static_cast<std::size_t>(side) * c * sizeof(float);
    parallel_for(set.tiles.size(), [&](std::size_t i) {
        const int r = static_cast<int>(i) / set.cols;
        const int col = static_cast<int>(i) % set.cols;
        const ImageBuffer& tile = set.tiles[i];
        for (int y = 0; y < side; ++y)
            std::memcpy(out.row(r * side + y) + static_cast<std::size_t>(col) * side * c,
                        tile.row(y), row_bytes);
    });
    return out;
}

} // namespace sglc
