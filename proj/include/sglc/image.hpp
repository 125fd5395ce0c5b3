#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace sglc {

/// H x W x C raster of 32-bit float samples, row-major, channel-interleaved,
/// nominal range [0,1]. The universal carrier between pipeline stages.
/// Value semantics; buffers are immutable-by-convention once handed to a
/// stage, so sharing read-only across threads is safe.
class ImageBuffer {
public:
    ImageBuffer() = default; // empty; operations reject empty buffers

    ImageBuffer(int height, int width, int channels);

    static ImageBuffer constant(int height, int width, int channels, float value);

    int height() const { return height_; }
    int width() const { return width_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }

    std::size_t pixel_count() const {
        return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
    }
    std::size_t sample_count() const { return data_.size(); }

    float& at(int y, int x, int c) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    const float& at(int y, int x, int c) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }

    float* row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_ * channels_; }
    const float* row(int y) const {
        return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
    }

    bool same_shape(const ImageBuffer& other) const {
        return height_ == other.height_ && width_ == other.width_ &&
               channels_ == other.channels_;
    }

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

enum class PadMode {
    Replicate, // repeat the edge sample
    Reflect,   // mirror about the edge sample (the sample itself not repeated)
};

/// Amount of padding added to the right and bottom edges by pad_to_multiple.
/// unpad(pad(img, spec), spec) is bit-identical to img.
struct PadSpec {
    int right = 0;
    int bottom = 0;
    PadMode mode = PadMode::Replicate;

    bool is_zero() const { return right == 0 && bottom == 0; }
};

/// Smallest extent >= size divisible by multiple:
/// size itself when divisible, else (size div multiple + 1) * multiple.
int padded_extent(int size, int multiple);

/// Pads bottom/right so both dimensions become divisible by `multiple`;
/// original content stays anchored top-left. Already-divisible images come
/// back unchanged with a zero PadSpec.
std::pair<ImageBuffer, PadSpec> pad_to_multiple(const ImageBuffer& img, int multiple,
                                                PadMode mode = PadMode::Replicate);

/// Crops the padding recorded in `spec`; exact inverse of pad_to_multiple.
ImageBuffer unpad(const ImageBuffer& img, const PadSpec& spec);

/// Copy with every sample clamped to [0,1]. Idempotent.
ImageBuffer clamp01(const ImageBuffer& img);

/// General border padding (used by the overlap smoother for its margins).
ImageBuffer pad_borders(const ImageBuffer& img, int left, int right, int top,
                        int bottom, PadMode mode);

/// Rectangular copy: `side`-agnostic crop of [x0, x0+w) x [y0, y0+h).
ImageBuffer crop(const ImageBuffer& img, int x0, int y0, int w, int h);

/// Index clamped to [0, n).
inline int clamp_index(int i, int n) {
    return i < 0 ? 0 : (i >= n ? n - 1 : i);
}

/// Mirror-fold index into [0, n), reflecting about the first/last sample
/// (period 2n-2). Valid for any i when n >= 2; n == 1 returns 0.
inline int reflect_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    int j = i % period;
    if (j < 0) j += period;
    return j < n ? j : period - j;
}

} // namespace sglc
