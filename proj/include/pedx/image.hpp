#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace pedx {

// 8-bit interleaved image, row-major (height, width, channels).
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 3;
    std::vector<std::uint8_t> pixels;

    Image() = default;
    Image(std::size_t w, std::size_t h, std::size_t c = 3, std::uint8_t fill = 0)
        : width(w), height(h), channels(c), pixels(w * h * c, fill) {}

    bool empty() const noexcept { return width == 0 || height == 0; }
    std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c) { return pixels[(y * width + x) * channels + c]; }
    std::uint8_t at(std::size_t x, std::size_t y, std::size_t c) const {
        return pixels[(y * width + x) * channels + c];
    }
    friend bool operator==(const Image&, const Image&) = default;
};

Image flip_horizontal(const Image& img);

// PNG I/O (8-bit gray, RGB or RGBA). Writes go to a temporary file that is
// renamed into place, so a failed write leaves nothing behind.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

// Writes bytes via temp file + rename. Throws RuntimeError on failure.
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace pedx
