#include "sglc/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <png.h>

namespace sglc {

namespace {

constexpr char kMagic[8] = {'S', 'G', 'L', 'C', 'R', 'A', 'W', '1'};
constexpr std::size_t kHeaderSize = 20;

void put_u32le(std::uint8_t* out, std::uint32_t v) {
    out[0] = static_cast<std::uint8_t>(v);
    out[1] = static_cast<std::uint8_t>(v >> 8);
    out[2] = static_cast<std::uint8_t>(v >> 16);
    out[3] = static_cast<std::uint8_t>(v >> 24);
}

std::uint32_t get_u32le(const std::uint8_t* in) {
    return static_cast<std::uint32_t>(in[0]) | (static_cast<std::uint32_t>(in[1]) << 8) |
           (static_cast<std::uint32_t>(in[2]) << 16) |
           (static_cast<std::uint32_t>(in[3]) << 24);
}

std::string path_str(const std::filesystem::path& p) { return p.string(); }

bool has_png_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png";
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f != nullptr) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

std::vector<std::uint8_t> encode_raw(const ImageBuffer& img) {
    if (img.empty()) throw IoError("encode_raw: empty image");
    std::vector<std::uint8_t> out(kHeaderSize + img.sample_count() * 4);
    std::memcpy(out.data(), kMagic, 8);
    put_u32le(out.data() + 8, static_cast<std::uint32_t>(img.height()));
    put_u32le(out.data() + 12, static_cast<std::uint32_t>(img.width()));
    put_u32le(out.data() + 16, static_cast<std::uint32_t>(img.channels()));
    std::uint8_t* p = out.data() + kHeaderSize;
    const float* samples = img.data();
    for (std::size_t i = 0; i < img.sample_count(); ++i, p += 4)
        put_u32le(p, std::bit_cast<std::uint32_t>(samples[i]));
    return out;
}

ImageBuffer decode_raw(const std::uint8_t* bytes, std::size_t size) {
    if (size < kHeaderSize) throw IoError("raw image: truncated header");
    if (std::memcmp(bytes, kMagic, 8) != 0) throw IoError("raw image: bad magic");
    const std::uint32_t h = get_u32le(bytes + 8);
    const std::uint32_t w = get_u32le(bytes + 12);
    const std::uint32_t c = get_u32le(bytes + 16);
    if (h == 0 || w == 0) throw IoError("raw image: zero dimensions");
    if (c != 1 && c != 3) throw IoError("raw image: channels must be 1 or 3");
    const std::size_t samples = static_cast<std::size_t>(h) * w * c;
    if (samples > (static_cast<std::size_t>(1) << 31))
        throw IoError("raw image: implausibly large dimensions");
    if (size != kHeaderSize + samples * 4)
        throw IoError("raw image: payload length does not match header");

    ImageBuffer img(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c));
    const std::uint8_t* p = bytes + kHeaderSize;
    float* out = img.data();
    for (std::size_t i = 0; i < samples; ++i, p += 4) {
        const float v = std::bit_cast<float>(get_u32le(p));
        if (!std::isfinite(v)) throw IoError("raw image: non-finite sample");
        out[i] = v;
    }
    return img;
}

void write_raw(const std::filesystem::path& path, const ImageBuffer& img) {
    const std::vector<std::uint8_t> bytes = encode_raw(img);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path_str(path));
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path_str(path));
}

ImageBuffer read_raw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path_str(path));
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed: " + path_str(path));
    try {
        return decode_raw(bytes.data(), bytes.size());
    } catch (const IoError& e) {
        throw IoError(path_str(path) + ": " + e.what());
    }
}

ImageBuffer read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path_str(path).c_str(), "rb"));
    if (!file) throw IoError("cannot open: " + path_str(path));

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                             nullptr);
    if (png == nullptr) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }

    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png decode failed: " + path_str(path));
    }

    png_init_io(png, file.get());
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if ((color_type & PNG_COLOR_MASK_ALPHA) != 0 ||
        png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png with alpha is not supported: " + path_str(path));
    }
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (bit_depth == 16) png_set_swap(png); // stored big-endian
    if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE)
        png_set_interlace_handling(png);
    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    color_type = png_get_color_type(png, info);
    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png must be grayscale or RGB: " + path_str(path));
    }

    const std::size_t row_bytes = png_get_rowbytes(png, info);
    pixels.resize(row_bytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageBuffer img(static_cast<int>(height), static_cast<int>(width), channels);
    const float scale = bit_depth == 16 ? 1.0f / 65535.0f : 1.0f / 255.0f;
    float* out = img.data();
    const std::size_t samples_per_row = static_cast<std::size_t>(width) * channels;
    for (png_uint_32 y = 0; y < height; ++y) {
        if (bit_depth == 16) {
            const std::uint16_t* src =
                reinterpret_cast<const std::uint16_t*>(pixels.data() + y * row_bytes);
            for (std::size_t i = 0; i < samples_per_row; ++i)
                *out++ = static_cast<float>(src[i]) * scale;
        } else {
            const std::uint8_t* src = pixels.data() + y * row_bytes;
            for (std::size_t i = 0; i < samples_per_row; ++i)
                *out++ = static_cast<float>(src[i]) * scale;
        }
    }
    return img;
}

void write_png(const std::filesystem::path& path, const ImageBuffer& img,
               int bit_depth) {
    if (img.empty()) throw IoError("write_png: empty image");
    if (bit_depth != 8 && bit_depth != 16)
        throw IoError("write_png: bit depth must be 8 or 16");

    FilePtr file(std::fopen(path_str(path).c_str(), "wb"));
    if (!file) throw IoError("cannot open for writing: " + path_str(path));

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                              nullptr);
    if (png == nullptr) throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }

    const int height = img.height();
    const int width = img.width();
    const int channels = img.channels();
    const std::size_t samples_per_row = static_cast<std::size_t>(width) * channels;
    const std::size_t row_bytes = samples_per_row * (bit_depth / 8);
    std::vector<std::uint8_t> pixels(row_bytes * height);
    const float maxval = bit_depth == 16 ? 65535.0f : 255.0f;
    for (int y = 0; y < height; ++y) {
        const float* src = img.row(y);
        if (bit_depth == 16) {
            std::uint16_t* dst =
                reinterpret_cast<std::uint16_t*>(pixels.data() + y * row_bytes);
            for (std::size_t i = 0; i < samples_per_row; ++i) {
                const float v = std::min(std::max(src[i], 0.0f), 1.0f);
                dst[i] = static_cast<std::uint16_t>(std::lround(v * maxval));
            }
        } else {
            std::uint8_t* dst = pixels.data() + y * row_bytes;
            for (std::size_t i = 0; i < samples_per_row; ++i) {
                const float v = std::min(std::max(src[i], 0.0f), 1.0f);
                dst[i] = static_cast<std::uint8_t>(std::lround(v * maxval));
            }
        }
    }
    std::vector<png_bytep> rows(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) rows[y] = pixels.data() + y * row_bytes;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png encode failed: " + path_str(path));
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width),
                 static_cast<png_uint_32>(height), bit_depth,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bit_depth == 16) png_set_swap(png);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

ImageBuffer read_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw IoError("no such file: " + path_str(path));
    return has_png_extension(path) ? read_png(path) : read_raw(path);
}

void write_image(const std::filesystem::path& path, const ImageBuffer& img) {
    if (has_png_extension(path))
        write_png(path, img);
    else
        write_raw(path, img);
}

} // namespace sglc
