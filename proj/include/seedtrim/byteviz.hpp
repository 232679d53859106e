#pragma once

#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "seedtrim/core.hpp"
#include "seedtrim/png.hpp"

// Byte-color visualization of generated test inputs: every executed input is
// appended to a dump file as one lowercase-hex line, and each dump line can
// be rendered as a grid image where box k shows byte k as a shade of red.

namespace seedtrim {

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

// Byte xy maps to hex color #xy0000: the byte value becomes the red channel.
inline Rgb byte_to_color(std::uint8_t b) { return {b, 0, 0}; }

struct ImageLayout {
    std::size_t box_px = 8;
    std::size_t boxes_per_row = 32;
    std::optional<std::size_t> max_bytes;  // cap on bytes rendered per frame

    void validate() const;  // throws std::invalid_argument
};

// One lowercase-hex line (no newline) for an input; empty input -> "".
std::string hex_line(const Bytes& input);

// Appends hex lines to a dump file, one per input, in generation order.
// Appends are serialized, so one sink can be shared across threads.
class ColorDumpWriter {
  public:
    // flush_every = 1 flushes after every line; N flushes every N lines.
    explicit ColorDumpWriter(const std::string& path, std::size_t flush_every = 1);

    // Throws std::runtime_error naming the entry index on I/O failure.
    void append(const Bytes& input);
    void flush();
    std::size_t entries_written() const { return count_; }

  private:
    std::string path_;
    std::ofstream out_;
    std::size_t flush_every_;
    std::size_t count_ = 0;
    std::mutex mutex_;
};

// Parses dump text: every line (including empty ones) is one input. Throws
// std::invalid_argument naming the 1-based line number for odd-length or
// non-hex lines.
std::vector<Bytes> parse_color_dump(const std::string& text);
std::vector<Bytes> load_color_dump(const std::string& path);

// Renders the input as a byte grid: byte k fills the box_px-square box at
// row k / boxes_per_row, column k % boxes_per_row, colored by
// byte_to_color; trailing boxes in the last row are white. Width is
// boxes_per_row*box_px, height ceil(bytes/boxes_per_row)*box_px. Zero bytes
// give a 1x1 white image.
Image render_frame(const Bytes& input, const ImageLayout& layout);

// "file_%09d.png" with a 1-based index.
std::string frame_file_name(std::size_t index);

// Renders every dump line to out_dir/file_%09d.png in generation order and
// returns the file names written. A malformed line raises
// std::invalid_argument naming the line; frames already written are kept.
std::vector<std::string> render_dump(const std::string& dump_path,
                                     const std::string& out_dir,
                                     const ImageLayout& layout);

}  // namespace seedtrim
