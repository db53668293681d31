#include "pedx/image.hpp"

#include <png.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "pedx/error.hpp"

namespace pedx {

namespace fs = std::filesystem;

Image flip_horizontal(const Image& img) {
    Image out(img.width, img.height, img.channels);
    for (std::size_t y = 0; y < img.height; ++y)
        for (std::size_t x = 0; x < img.width; ++x)
            for (std::size_t c = 0; c < img.channels; ++c) out.at(img.width - 1 - x, y, c) = img.at(x, y, c);
    return out;
}

namespace {

fs::path temp_path_for(const fs::path& path) {
    return fs::path(path.string() + ".tmp" + std::to_string(::getpid()));
}

void commit(const fs::path& tmp, const fs::path& path) {
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw RuntimeError("cannot write " + path.string());
    }
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    const auto tmp = temp_path_for(path);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw RuntimeError("cannot write " + path.string());
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            out.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw RuntimeError("write failed: " + path.string());
        }
    }
    commit(tmp, path);
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    write_file_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Image read_png(const fs::path& path) {
    png_image desc{};
    desc.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&desc, path.c_str()))
        throw DataError("cannot read PNG " + path.string() + ": " + desc.message);
    const bool gray = (desc.format & PNG_FORMAT_FLAG_COLOR) == 0;
    desc.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    Image img(desc.width, desc.height, gray ? 1 : 3);
    if (!png_image_finish_read(&desc, nullptr, img.pixels.data(), 0, nullptr)) {
        png_image_free(&desc);
        throw DataError("corrupt PNG " + path.string() + ": " + desc.message);
    }
    return img;
}

void write_png(const fs::path& path, const Image& img) {
    if (img.empty()) throw RuntimeError("refusing to write empty image " + path.string());
    png_image desc{};
    desc.version = PNG_IMAGE_VERSION;
    desc.width = static_cast<png_uint_32>(img.width);
    desc.height = static_cast<png_uint_32>(img.height);
    switch (img.channels) {
        case 1: desc.format = PNG_FORMAT_GRAY; break;
        case 3: desc.format = PNG_FORMAT_RGB; break;
        case 4: desc.format = PNG_FORMAT_RGBA; break;
        default: throw RuntimeError("unsupported channel count for PNG: " + std::to_string(img.channels));
    }
    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(desc, size, 0, img.pixels.data(), 0, nullptr))
        throw RuntimeError("PNG encode failed: " + std::string(desc.message));
    std::vector<std::uint8_t> bytes(size);
    if (!png_image_write_to_memory(&desc, bytes.data(), &size, 0, img.pixels.data(), 0, nullptr))
        throw RuntimeError("PNG encode failed: " + std::string(desc.message));
    bytes.resize(size);
    write_file_atomic(path, bytes);
}

}  // namespace pedx
