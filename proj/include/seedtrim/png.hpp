#pragma once

#include <cstdint>
#include <string>

#include "seedtrim/core.hpp"

// Minimal PNG output: 8-bit RGB, no interlacing, zlib stream built from
// stored (uncompressed) deflate blocks. Frames here are small byte-grid
// images, so compression buys nothing.

namespace seedtrim {

struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    Bytes rgb;  // row-major, 3 bytes per pixel

    bool operator==(const Image&) const = default;
};

// Encodes the image as a complete PNG byte stream. Throws
// std::invalid_argument when the pixel buffer does not match the dimensions.
Bytes encode_png_rgb(const Image& image);

// Writes the encoded PNG to disk. Throws std::runtime_error on I/O failure.
void write_png_rgb(const std::string& path, const Image& image);

}  // namespace seedtrim
