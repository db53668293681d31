#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pedx/image.hpp"
#include "pedx/trackdata.hpp"

namespace pedx {

enum class CropMode { Static, Dynamic };

std::string_view to_string(CropMode mode) noexcept;
CropMode parse_crop_mode(std::string_view s);

struct CropConfig {
    CropMode mode = CropMode::Dynamic;
    std::size_t static_width = 600;
    std::size_t static_height = 600;
    double dynamic_margin_fraction = 0.05;  // of bbox height, added on every side
    std::size_t model_input_size = 64;
    std::uint8_t pad_value = 0;

    void validate() const;
};

// Half-open pixel window [x0, x1) x [y0, y1); may extend past the frame.
struct CropWindow {
    long x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    long width() const noexcept { return x1 - x0; }
    long height() const noexcept { return y1 - y0; }
    friend bool operator==(const CropWindow&, const CropWindow&) = default;
};

// Round half away from zero; all window edges go through this.
long round_edge(double v) noexcept;

CropWindow static_window(const BoundingBox& bbox, const CropConfig& cfg);
CropWindow dynamic_window(const BoundingBox& bbox, const CropConfig& cfg);
CropWindow crop_window(const BoundingBox& bbox, const CropConfig& cfg);

// Copies the window out of `frame`; out-of-frame pixels get `pad`.
Image extract_window(const Image& frame, const CropWindow& w, std::uint8_t pad);

// Throws DataError when the box does not intersect the frame.
Image static_crop(const Image& frame, const BoundingBox& bbox, const CropConfig& cfg);
Image dynamic_crop(const Image& frame, const BoundingBox& bbox, const CropConfig& cfg);

// Bilinear resize, align-corners=false, round-to-nearest on output.
Image resize_bilinear(const Image& img, std::size_t out_w, std::size_t out_h);

// Aspect-preserving scale so the longer side equals S, centered on a pad_value
// canvas. Odd padding puts the extra pixel on the right / bottom.
Image letterbox_to_model_input(const Image& img, const CropConfig& cfg);

// Where letterboxed content lands inside the S x S canvas.
CropWindow letterbox_content_box(std::size_t w, std::size_t h, std::size_t S);

// Crop per cfg.mode, then bring to S x S (static: direct resize; dynamic:
// letterbox).
Image crop_for_model(const Image& frame, const BoundingBox& bbox, const CropConfig& cfg);

// Frames of one observation window, each S x S x 3.
struct CropClip {
    std::string track_id;
    CropMode mode = CropMode::Dynamic;
    std::vector<std::int64_t> frame_indices;
    std::size_t size = 0;
    std::vector<Image> frames;
};

CropClip flip_clip(const CropClip& clip);

}  // namespace pedx
