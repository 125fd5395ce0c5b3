#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "sglc/image.hpp"

namespace sglc {

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Raw image format: lossless float interchange for tests and the
/// external-process restorer protocol.
///   bytes 0..7   magic "SGLCRAW1"
///   bytes 8..19  height, width, channels as little-endian uint32
///   then height*width*channels little-endian IEEE-754 f32 samples,
///   row-major, channel-interleaved.
/// Channels must be 1 or 3; samples must be finite. Byte-exact round trip.
std::vector<std::uint8_t> encode_raw(const ImageBuffer& img);
ImageBuffer decode_raw(const std::uint8_t* bytes, std::size_t size);

void write_raw(const std::filesystem::path& path, const ImageBuffer& img);
ImageBuffer read_raw(const std::filesystem::path& path);

/// PNG I/O via libpng. Reads 8/16-bit grayscale or RGB (palette expanded);
/// alpha is rejected. Samples are scaled by 1/(2^depth - 1) on read and
/// written as 16-bit by default (round trip within one quantization step).
ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& img,
               int bit_depth = 16);

/// Dispatch on extension: .png for PNG, anything else raw.
ImageBuffer read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const ImageBuffer& img);

} // namespace sglc
