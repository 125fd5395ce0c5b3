#include "sglc/image.hpp"

#include <cstring>
#include <stdexcept>
#include <string>

#include "sglc/kernels.hpp"

namespace sglc {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

int source_index(int i, int n, PadMode mode) {
    return mode == PadMode::Replicate ? clamp_index(i, n) : reflect_index(i, n);
}

} // namespace

ImageBuffer::ImageBuffer(int height, int width, int channels)
    : height_(height), width_(width), channels_(channels) {
    require(height >= 1 && width >= 1, "ImageBuffer: dimensions must be >= 1");
    require(channels == 1 || channels == 3, "ImageBuffer: channels must be 1 or 3");
    data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0f);
}

ImageBuffer ImageBuffer::constant(int height, int width, int channels, float value) {
    ImageBuffer img(height, width, channels);
    std::fill(img.data_.begin(), img.data_.end(), value);
    return img;
}

int padded_extent(int size, int multiple) {
    require(size >= 1, "padded_extent: size must be >= 1");
    require(multiple >= 1, "padded_extent: multiple must be >= 1");
    return size % multiple == 0 ? size : (size / multiple + 1) * multiple;
}

std::pair<ImageBuffer, PadSpec> pad_to_multiple(const ImageBuffer& img, int multiple,
                                                PadMode mode) {
    require(!img.empty(), "pad_to_multiple: empty image");
    require(multiple >= 1, "pad_to_multiple: multiple must be >= 1");

    const int h = img.height();
    const int w = img.width();
    const int padded_h = padded_extent(h, multiple);
    const int padded_w = padded_extent(w, multiple);

    PadSpec spec{padded_w - w, padded_h - h, mode};
    if (spec.is_zero()) return {img, spec};
    return {pad_borders(img, 0, spec.right, 0, spec.bottom, mode), spec};
}

ImageBuffer unpad(const ImageBuffer& img, const PadSpec& spec) {
    require(!img.empty(), "unpad: empty image");
    require(spec.right >= 0 && spec.bottom >= 0, "unpad: negative pad amounts");
    require(spec.right < img.width() && spec.bottom < img.height(),
            "unpad: spec larger than image");
    if (spec.is_zero()) return img;
    return crop(img, 0, 0, img.width() - spec.right, img.height() - spec.bottom);
}

ImageBuffer clamp01(const ImageBuffer& img) {
    ImageBuffer out = img;
    kernels::active().clamp01(out.data(), out.sample_count());
    return out;
}

ImageBuffer pad_borders(const ImageBuffer& img, int left, int right, int top,
                        int bottom, PadMode mode) {
    require(!img.empty(), "pad_borders: empty image");
    require(left >= 0 && right >= 0 && top >= 0 && bottom >= 0,
            "pad_borders: negative pad amounts");
    if (left == 0 && right == 0 && top == 0 && bottom == 0) return img;

    const int h = img.height();
    const int w = img.width();
    const int c = img.channels();
    ImageBuffer out(h + top + bottom, w + left + right, c);

    // Resolve each output column's source column once, then fill row by row.
    std::vector<int> col_src(static_cast<std::size_t>(out.width()));
    for (int x = 0; x < out.width(); ++x) col_src[x] = source_index(x - left, w, mode);

    for (int y = 0; y < out.height(); ++y) {
        const int sy = source_index(y - top, h, mode);
        const float* src = img.row(sy);
        float* dst = out.row(y);
        if (left == 0 && right == 0) {
            std::memcpy(dst, src, static_cast<std::size_t>(w) * c * sizeof(float));
            continue;
        }
        for (int x = 0; x < out.width(); ++x) {
            const float* s = src + static_cast<std::size_t>(col_src[x]) * c;
            float* d = dst + static_cast<std::size_t>(x) * c;
            for (int ch = 0; ch < c; ++ch) d[ch] = s[ch];
        }
    }
    return out;
}

ImageBuffer crop(const ImageBuffer& img, int x0, int y0, int w, int h) {
    require(!img.empty(), "crop: empty image");
    require(w >= 1 && h >= 1, "crop: dimensions must be >= 1");
    require(x0 >= 0 && y0 >= 0 && x0 + w <= img.width() && y0 + h <= img.height(),
            "crop: region out of bounds");

    const int c = img.channels();
    ImageBuffer out(h, w, c);
    const std::size_t row_bytes = static_cast<std::size_t>(w) * c * sizeof(float);
    for (int y = 0; y < h; ++y)
        std::memcpy(out.row(y), img.row(y0 + y) + static_cast<std::size_t>(x0) * c,
                    row_bytes);
    return out;
}

} // namespace sglc
