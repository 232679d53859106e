#include "seedtrim/png.hpp"

#include <array>
#include <fstream>
#include <stdexcept>

namespace seedtrim {

namespace {

std::uint32_t crc32(const std::uint8_t* data, std::size_t len,
                    std::uint32_t crc = 0) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k)
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    crc ^= 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i)
        crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

std::uint32_t adler32(const Bytes& data) {
    std::uint32_t a = 1, b = 0;
    for (std::uint8_t byte : data) {
        a = (a + byte) % 65521;
        b = (b + a) % 65521;
    }
    return (b << 16) | a;
}

void put_be32(Bytes& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(Bytes& out, const char type[4], const Bytes& data) {
    put_be32(out, static_cast<std::uint32_t>(data.size()));
    Bytes body(type, type + 4);
    body.insert(body.end(), data.begin(), data.end());
    out.insert(out.end(), body.begin(), body.end());
    put_be32(out, crc32(body.data(), body.size()));
}

// zlib stream with stored deflate blocks (max 65535 bytes each).
Bytes zlib_stored(const Bytes& raw) {
    Bytes out;
    out.push_back(0x78);
    out.push_back(0x01);
    std::size_t pos = 0;
    do {
        const std::size_t len = std::min<std::size_t>(raw.size() - pos, 65535);
        const bool final_block = pos + len == raw.size();
        out.push_back(final_block ? 0x01 : 0x00);
        out.push_back(static_cast<std::uint8_t>(len & 0xFF));
        out.push_back(static_cast<std::uint8_t>(len >> 8));
        out.push_back(static_cast<std::uint8_t>(~len & 0xFF));
        out.push_back(static_cast<std::uint8_t>((~len >> 8) & 0xFF));
        out.insert(out.end(), raw.begin() + static_cast<std::ptrdiff_t>(pos),
                   raw.begin() + static_cast<std::ptrdiff_t>(pos + len));
        pos += len;
    } while (pos < raw.size());
    put_be32(out, adler32(raw));
    return out;
}

}  // namespace

Bytes encode_png_rgb(const Image& image) {
    if (image.width == 0 || image.height == 0 ||
        image.rgb.size() != image.width * image.height * 3)
        throw std::invalid_argument("image buffer does not match dimensions");

    static const std::uint8_t kSignature[8] = {0x89, 'P',  'N',  'G',
                                               0x0D, 0x0A, 0x1A, 0x0A};
    Bytes out(kSignature, kSignature + 8);

    Bytes ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(image.width));
    put_be32(ihdr, static_cast<std::uint32_t>(image.height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // color type: truecolor RGB
    ihdr.push_back(0);  // compression
    ihdr.push_back(0);  // filter
    ihdr.push_back(0);  // interlace
    append_chunk(out, "IHDR", ihdr);

    // One filter byte (0 = None) per scanline.
    Bytes raw;
    raw.reserve(image.height * (1 + image.width * 3));
    for (std::size_t y = 0; y < image.height; ++y) {
        raw.push_back(0);
        const auto row = image.rgb.begin() +
                         static_cast<std::ptrdiff_t>(y * image.width * 3);
        raw.insert(raw.end(), row, row + static_cast<std::ptrdiff_t>(image.width * 3));
    }
    append_chunk(out, "IDAT", zlib_stored(raw));
    append_chunk(out, "IEND", {});
    return out;
}

void write_png_rgb(const std::string& path, const Image& image) {
    const Bytes png = encode_png_rgb(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(png.data()),
              static_cast<std::streamsize>(png.size()));
    out.close();
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace seedtrim
