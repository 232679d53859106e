#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "seedtrim/byteviz.hpp"
#include "seedtrim/fuzzer.hpp"
#include "test_util.hpp"

using namespace seedtrim;

namespace {

ImageLayout layout_of(std::size_t box_px, std::size_t boxes_per_row) {
    ImageLayout layout;
    layout.box_px = box_px;
    layout.boxes_per_row = boxes_per_row;
    return layout;
}

std::uint32_t be32(const Bytes& b, std::size_t off) {
    return std::uint32_t(b[off]) << 24 | std::uint32_t(b[off + 1]) << 16 |
           std::uint32_t(b[off + 2]) << 8 | std::uint32_t(b[off + 3]);
}

// Structural PNG decode for our encoder's output: walks chunks, inflates the
// stored deflate blocks by hand, strips filter bytes. Returns the pixel rows.
Image decode_png(const Bytes& png) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    REQUIRE(png.size() > 8);
    REQUIRE(std::equal(sig, sig + 8, png.begin()));

    Image img;
    Bytes idat;
    std::size_t pos = 8;
    bool saw_end = false;
    while (pos + 8 <= png.size() && !saw_end) {
        const std::uint32_t len = be32(png, pos);
        const std::string type(png.begin() + pos + 4, png.begin() + pos + 8);
        const std::size_t data = pos + 8;
        REQUIRE(data + len + 4 <= png.size());
        if (type == "IHDR") {
            REQUIRE(len == 13);
            img.width = be32(png, data);
            img.height = be32(png, data + 4);
            CHECK(png[data + 8] == 8);   // bit depth
            CHECK(png[data + 9] == 2);   // truecolor
            CHECK(png[data + 12] == 0);  // no interlace
        } else if (type == "IDAT") {
            idat.insert(idat.end(), png.begin() + data, png.begin() + data + len);
        } else if (type == "IEND") {
            saw_end = true;
        }
        pos = data + len + 4;  // skip crc
    }
    REQUIRE(saw_end);

    // zlib header then stored blocks: 1-byte final flag, LEN, ~LEN.
    REQUIRE(idat.size() >= 6);
    CHECK((idat[0] & 0x0F) == 8);  // deflate method
    Bytes raw;
    std::size_t p = 2;
    for (;;) {
        REQUIRE(p + 5 <= idat.size());
        const std::uint8_t final_block = idat[p];
        const std::size_t len = idat[p + 1] | std::size_t(idat[p + 2]) << 8;
        const std::size_t nlen = idat[p + 3] | std::size_t(idat[p + 4]) << 8;
        REQUIRE((len ^ nlen) == 0xFFFF);
        p += 5;
        REQUIRE(p + len <= idat.size());
        raw.insert(raw.end(), idat.begin() + p, idat.begin() + p + len);
        p += len;
        if (final_block & 1) break;
    }

    const std::size_t stride = 1 + img.width * 3;
    REQUIRE(raw.size() == img.height * stride);
    for (std::size_t y = 0; y < img.height; ++y) {
        CHECK(raw[y * stride] == 0);  // filter: None
        img.rgb.insert(img.rgb.end(), raw.begin() + y * stride + 1,
                       raw.begin() + (y + 1) * stride);
    }
    return img;
}

}  // namespace

TEST_CASE("byte_to_color maps a byte to a shade of red") {
    CHECK(byte_to_color(0x00) == Rgb{0x00, 0, 0});
    CHECK(byte_to_color(0xFF) == Rgb{0xFF, 0, 0});
    CHECK(byte_to_color(0x41) == Rgb{0x41, 0, 0});
}

TEST_CASE("hex_line matches an independent encoder") {
    const Bytes input = {0x00, 0xFF, 0x41};
    CHECK(hex_line(input) == "00ff41");
    CHECK(hex_line({}) == "");

    Rng rng(8);
    for (int round = 0; round < 50; ++round) {
        Bytes bytes;
        for (std::uint64_t i = 0, n = rng.below(20); i < n; ++i)
            bytes.push_back(rng.byte());
        std::string expected;
        for (auto b : bytes) {
            char buf[3];
            std::snprintf(buf, sizeof buf, "%02x", b);
            expected += buf;
        }
        CHECK(hex_line(bytes) == expected);
    }
}

TEST_CASE("dump writing and parsing round-trip") {
    testutil::TempDir tmp;
    const std::string path = tmp.file("dump");

    std::vector<Bytes> inputs = {{0x00, 0xFF, 0x41}, {}, {0xAB}};
    {
        ColorDumpWriter writer(path);
        for (const auto& input : inputs) writer.append(input);
        CHECK(writer.entries_written() == 3);
    }
    CHECK(read_file_bytes(path) ==
          Bytes{'0', '0', 'f', 'f', '4', '1', '\n', '\n', 'a', 'b', '\n'});
    CHECK(load_color_dump(path) == inputs);

    SUBCASE("random round-trips, empty inputs included") {
        Rng rng(9);
        for (int round = 0; round < 100; ++round) {
            std::vector<Bytes> generated;
            std::string text;
            for (std::uint64_t i = 0, n = rng.below(8); i < n; ++i) {
                Bytes bytes;
                for (std::uint64_t j = 0, m = rng.below(12); j < m; ++j)
                    bytes.push_back(rng.byte());
                text += hex_line(bytes) + "\n";
                generated.push_back(std::move(bytes));
            }
            CHECK(parse_color_dump(text) == generated);
        }
    }
}

TEST_CASE("dump parse errors name the line") {
    CHECK_THROWS_WITH_AS(parse_color_dump("abc\n"),
                         "dump line 1: odd number of hex digits",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_color_dump("00\n0g\n"),
                         "dump line 2: invalid hex character",
                         std::invalid_argument);
    CHECK_THROWS_AS(parse_color_dump("AB\n"), std::invalid_argument);  // uppercase
}

TEST_CASE("render_frame") {
    SUBCASE("hand-computed 2x2 raster") {
        const Image img = render_frame({0x00, 0x7F, 0xAB, 0xFF}, layout_of(1, 2));
        CHECK(img.width == 2);
        CHECK(img.height == 2);
        CHECK(img.rgb == Bytes{0x00, 0, 0, 0x7F, 0, 0, 0xAB, 0, 0, 0xFF, 0, 0});
    }
    SUBCASE("trailing boxes are white") {
        const Image img = render_frame({0x01, 0x02, 0x03}, layout_of(1, 2));
        CHECK(img.rgb == Bytes{0x01, 0, 0, 0x02, 0, 0, 0x03, 0, 0, 0xFF, 0xFF, 0xFF});
    }
    SUBCASE("one byte scales to a uniform box") {
        const Image img = render_frame({0x80}, layout_of(8, 1));
        CHECK(img.width == 8);
        CHECK(img.height == 8);
        for (std::size_t k = 0; k < 64; ++k) {
            CHECK(img.rgb[3 * k] == 0x80);
            CHECK(img.rgb[3 * k + 1] == 0);
            CHECK(img.rgb[3 * k + 2] == 0);
        }
    }
    SUBCASE("zero bytes give a 1x1 white image") {
        const Image img = render_frame({}, layout_of(8, 32));
        CHECK(img.width == 1);
        CHECK(img.height == 1);
        CHECK(img.rgb == Bytes{0xFF, 0xFF, 0xFF});
    }
    SUBCASE("max_bytes caps rendering") {
        ImageLayout layout = layout_of(1, 4);
        layout.max_bytes = 4;
        const Image img = render_frame(Bytes(100, 0x10), layout);
        CHECK(img.width == 4);
        CHECK(img.height == 1);
    }
    SUBCASE("dimension formula and channel property on random inputs") {
        Rng rng(31);
        for (int round = 0; round < 100; ++round) {
            const std::size_t len = rng.below(60);
            const ImageLayout layout =
                layout_of(1 + rng.below(4), 1 + rng.below(9));
            Bytes input;
            for (std::size_t i = 0; i < len; ++i) input.push_back(rng.byte());

            const Image img = render_frame(input, layout);
            if (len == 0) {
                CHECK(img.width == 1);
                CHECK(img.height == 1);
                continue;
            }
            const std::size_t rows =
                (len + layout.boxes_per_row - 1) / layout.boxes_per_row;
            CHECK(img.width == layout.boxes_per_row * layout.box_px);
            CHECK(img.height == rows * layout.box_px);
            for (std::size_t k = 0; k < img.width * img.height; ++k) {
                const bool white = img.rgb[3 * k] == 0xFF &&
                                   img.rgb[3 * k + 1] == 0xFF &&
                                   img.rgb[3 * k + 2] == 0xFF;
                const bool red_only =
                    img.rgb[3 * k + 1] == 0 && img.rgb[3 * k + 2] == 0;
                CHECK((white || red_only));
            }
        }
    }
    SUBCASE("layout validation") {
        CHECK_THROWS_AS(render_frame({0x01}, layout_of(0, 2)),
                        std::invalid_argument);
        CHECK_THROWS_AS(render_frame({0x01}, layout_of(1, 0)),
                        std::invalid_argument);
    }
}

TEST_CASE("png encoding round-trips through a structural decoder") {
    SUBCASE("small frame") {
        const Image img = render_frame({0x00, 0x7F, 0xAB}, layout_of(2, 2));
        CHECK(decode_png(encode_png_rgb(img)) == img);
    }
    SUBCASE("image crossing the stored-block size limit") {
        Image img;
        img.width = 200;
        img.height = 120;  // raw stream 72120 bytes > 65535
        img.rgb.assign(img.width * img.height * 3, 0x42);
        CHECK(decode_png(encode_png_rgb(img)) == img);
    }
    SUBCASE("rejects mismatched buffers") {
        Image img;
        img.width = 2;
        img.height = 2;
        img.rgb.assign(3, 0);
        CHECK_THROWS_AS(encode_png_rgb(img), std::invalid_argument);
    }
}

TEST_CASE("frame naming") {
    CHECK(frame_file_name(1) == "file_000000001.png");
    CHECK(frame_file_name(5572) == "file_000005572.png");
    CHECK(frame_file_name(123456789) == "file_123456789.png");
}

TEST_CASE("render_dump writes one ordered frame per line") {
    testutil::TempDir tmp;
    namespace fs = std::filesystem;

    SUBCASE("three lines, three frames") {
        write_text_file(tmp.file("dump"), "00\nff41\n\n");
        const auto files =
            render_dump(tmp.file("dump"), tmp.file("frames"), layout_of(1, 2));
        CHECK(files == std::vector<std::string>{"file_000000001.png",
                                                "file_000000002.png",
                                                "file_000000003.png"});
        for (const auto& name : files)
            CHECK(fs::exists(fs::path(tmp.file("frames")) / name));
        // the empty third line renders as the degenerate 1x1 white frame
        const Image third = decode_png(read_file_bytes(
            (fs::path(tmp.file("frames")) / files[2]).string()));
        CHECK(third.width == 1);
    }
    SUBCASE("empty dump writes nothing and succeeds") {
        write_text_file(tmp.file("empty"), "");
        const auto files =
            render_dump(tmp.file("empty"), tmp.file("frames2"), layout_of(1, 2));
        CHECK(files.empty());
    }
    SUBCASE("malformed line keeps earlier frames") {
        write_text_file(tmp.file("bad"), "00\nzz\n00\n");
        CHECK_THROWS_WITH_AS(
            render_dump(tmp.file("bad"), tmp.file("frames3"), layout_of(1, 2)),
            "dump line 2: invalid hex character", std::invalid_argument);
        CHECK(fs::exists(fs::path(tmp.file("frames3")) / "file_000000001.png"));
        CHECK_FALSE(fs::exists(fs::path(tmp.file("frames3")) / "file_000000002.png"));
    }
}
