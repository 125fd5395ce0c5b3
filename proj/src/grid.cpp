#include "sglc/grid.hpp"

#include <stdexcept>
#include <string>

#include "sglc/parallel.hpp"

namespace sglc {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

} // namespace

GridLayout make_grid_layout(int padded_height, int padded_width, int patch_side) {
    require(patch_side >= 1, "grid layout: patch side must be >= 1");
    require(padded_height >= patch_side && padded_width >= patch_side,
            "grid layout: image smaller than one patch");
    require(padded_height % patch_side == 0 && padded_width % patch_side == 0,
            "grid layout: dimensions not divisible by patch side");
    GridLayout layout;
    layout.patch_side = patch_side;
    layout.rows = padded_height / patch_side;
    layout.cols = padded_width / patch_side;
    layout.padded_height = padded_height;
    layout.padded_width = padded_width;
    return layout;
}

GridPatchSet grid_extract(const ImageBuffer& img, const GridLayout& layout) {
    require(!img.empty(), "grid_extract: empty image");
    require(img.height() == layout.padded_height && img.width() == layout.padded_width,
            "grid_extract: image dimensions do not match layout");

    const int side = layout.patch_side;
    const int rows = layout.rows;
    const int cols = layout.cols;
    const int c = img.channels();
    const int n = layout.patch_count();

    GridPatchSet set;
    set.layout = layout;
    set.patches.resize(static_cast<std::size_t>(n));

    parallel_for(static_cast<std::size_t>(n), [&](std::size_t l) {
        const int x_off = static_cast<int>(l) % cols;
        const int y_off = static_cast<int>(l) / cols;
        ImageBuffer patch(side, side, c);
        for (int iy = 0; iy < side; ++iy) {
            const int y = y_off + iy * rows;
            const float* src = img.row(y);
            float* dst = patch.row(iy);
            for (int ix = 0; ix < side; ++ix) {
                const int x = x_off + ix * cols;
                const float* s = src + static_cast<std::size_t>(x) * c;
                float* d = dst + static_cast<std::size_t>(ix) * c;
                for (int ch = 0; ch < c; ++ch) d[ch] = s[ch];
            }
        }
        set.patches[l] = std::move(patch);
    });
    return set;
}

ImageBuffer grid_reconstruct(const GridPatchSet& set) {
    const GridLayout& layout = set.layout;
    const int side = layout.patch_side;
    const int rows = layout.rows;
    const int cols = layout.cols;
    const int n = layout.patch_count();

    require(static_cast<int>(set.patches.size()) == n,
            "grid_reconstruct: patch count does not match layout");
    require(n >= 1, "grid_reconstruct: empty patch set");
    const int c = set.patches[0].channels();
    for (const ImageBuffer& p : set.patches)
        require(p.height() == side && p.width() == side && p.channels() == c,
                "grid_reconstruct: patch shape does not match layout");

    ImageBuffer out(layout.padded_height, layout.padded_width, c);
    // Destination pixels are disjoint per patch, so the scatter order is
    // irrelevant to the result.
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t l) {
        const int x_off = static_cast<int>(l) % cols;
        const int y_off = static_cast<int>(l) / cols;
        const ImageBuffer& patch = set.patches[l];
        for (int iy = 0; iy < side; ++iy) {
            const int y = y_off + iy * rows;
            const float* src = patch.row(iy);
            float* dst = out.row(y);
            for (int ix = 0; ix < side; ++ix) {
                const int x = x_off + ix * cols;
                const float* s = src + static_cast<std::size_t>(ix) * c;
                float* d = dst + static_cast<std::size_t>(x) * c;
                for (int ch = 0; ch < c; ++ch) d[ch] = s[ch];
            }
        }
    });
    return out;
}

} // namespace sglc
