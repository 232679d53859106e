#include "seedtrim/byteviz.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <stdexcept>

namespace seedtrim {

void ImageLayout::validate() const {
    if (box_px == 0) throw std::invalid_argument("box_px must be >= 1");
    if (boxes_per_row == 0)
        throw std::invalid_argument("boxes_per_row must be >= 1");
}

std::string hex_line(const Bytes& input) {
    static const char* digits = "0123456789abcdef";
    std::string line;
    line.reserve(input.size() * 2);
    for (std::uint8_t b : input) {
        line += digits[b >> 4];
        line += digits[b & 0xF];
    }
    return line;
}

ColorDumpWriter::ColorDumpWriter(const std::string& path, std::size_t flush_every)
    : path_(path),
      out_(path, std::ios::binary | std::ios::app),
      flush_every_(flush_every == 0 ? 1 : flush_every) {
    if (!out_) throw std::runtime_error("cannot open dump file: " + path);
}

void ColorDumpWriter::append(const Bytes& input) {
    const std::lock_guard<std::mutex> lock(mutex_);
    out_ << hex_line(input) << '\n';
    ++count_;
    if (count_ % flush_every_ == 0) out_.flush();
    if (!out_)
        throw std::runtime_error("dump write failed at entry " +
                                 std::to_string(count_) + ": " + path_);
}

void ColorDumpWriter::flush() {
    const std::lock_guard<std::mutex> lock(mutex_);
    out_.flush();
}

namespace {

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}

Bytes parse_hex_line(const std::string& line, std::size_t line_no) {
    if (line.size() % 2 != 0)
        throw std::invalid_argument("dump line " + std::to_string(line_no) +
                                    ": odd number of hex digits");
    Bytes bytes;
    bytes.reserve(line.size() / 2);
    for (std::size_t i = 0; i < line.size(); i += 2) {
        const int hi = hex_digit(line[i]);
        const int lo = hex_digit(line[i + 1]);
        if (hi < 0 || lo < 0)
            throw std::invalid_argument("dump line " + std::to_string(line_no) +
                                        ": invalid hex character");
        bytes.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
    }
    return bytes;
}

// Splits into lines; a trailing newline does not create a final entry, but
// interior empty lines do (they are zero-byte inputs).
std::vector<std::string> dump_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t begin = 0;
    while (begin < text.size()) {
        const std::size_t nl = text.find('\n', begin);
        if (nl == std::string::npos) {
            lines.push_back(text.substr(begin));
            break;
        }
        lines.push_back(text.substr(begin, nl - begin));
        begin = nl + 1;
    }
    return lines;
}

}  // namespace

std::vector<Bytes> parse_color_dump(const std::string& text) {
    std::vector<Bytes> inputs;
    std::size_t line_no = 0;
    for (const auto& line : dump_lines(text)) {
        ++line_no;
        inputs.push_back(parse_hex_line(line, line_no));
    }
    return inputs;
}

std::vector<Bytes> load_color_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dump file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_color_dump(ss.str());
}

Image render_frame(const Bytes& input, const ImageLayout& layout) {
    layout.validate();
    const std::size_t rendered =
        layout.max_bytes ? std::min(input.size(), *layout.max_bytes)
                         : input.size();

    Image img;
    if (rendered == 0) {
        img.width = img.height = 1;
        img.rgb = {0xFF, 0xFF, 0xFF};
        return img;
    }

    const std::size_t rows =
        (rendered + layout.boxes_per_row - 1) / layout.boxes_per_row;
    img.width = layout.boxes_per_row * layout.box_px;
    img.height = rows * layout.box_px;
    img.rgb.assign(img.width * img.height * 3, 0xFF);

    for (std::size_t k = 0; k < rendered; ++k) {
        const Rgb color = byte_to_color(input[k]);
        const std::size_t box_row = k / layout.boxes_per_row;
        const std::size_t box_col = k % layout.boxes_per_row;
        for (std::size_t y = 0; y < layout.box_px; ++y) {
            const std::size_t py = box_row * layout.box_px + y;
            std::size_t off =
                (py * img.width + box_col * layout.box_px) * 3;
            for (std::size_t x = 0; x < layout.box_px; ++x) {
                img.rgb[off++] = color.r;
                img.rgb[off++] = color.g;
                img.rgb[off++] = color.b;
            }
        }
    }
    return img;
}

std::string frame_file_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "file_%09zu.png", index);
    return buf;
}

std::vector<std::string> render_dump(const std::string& dump_path,
                                     const std::string& out_dir,
                                     const ImageLayout& layout) {
    layout.validate();
    std::ifstream in(dump_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dump file: " + dump_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    std::vector<std::string> written;
    std::size_t line_no = 0;
    for (const auto& line : dump_lines(text)) {
        ++line_no;
        // Parse one line at a time so frames before a malformed line survive.
        const Bytes input = parse_hex_line(line, line_no);
        const std::string name = frame_file_name(line_no);
        write_png_rgb((fs::path(out_dir) / name).string(),
                      render_frame(input, layout));
        written.push_back(name);
    }
    return written;
}

}  // namespace seedtrim
