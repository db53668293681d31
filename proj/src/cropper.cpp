#include "pedx/cropper.hpp"

#include <algorithm>
#include <cmath>

#include "pedx/error.hpp"
#include "pedx/log.hpp"

namespace pedx {

std::string_view to_string(CropMode mode) noexcept { return mode == CropMode::Static ? "static" : "dynamic"; }

CropMode parse_crop_mode(std::string_view s) {
    if (s == "static") return CropMode::Static;
    if (s == "dynamic") return CropMode::Dynamic;
    throw UsageError("unknown crop mode '" + std::string(s) + "' (expected static or dynamic)");
}

void CropConfig::validate() const {
    if (static_width == 0 || static_height == 0) throw UsageError("static crop size must be positive");
    if (model_input_size == 0) throw UsageError("model input size must be positive");
    if (!(dynamic_margin_fraction >= 0.0)) throw UsageError("dynamic margin fraction must be >= 0");
}

long round_edge(double v) noexcept { return static_cast<long>(std::round(v)); }

namespace {

void require_intersects(const Image& frame, const BoundingBox& b) {
    if (!b.valid()) throw DataError("invalid bounding box");
    if (b.x2 <= 0.0 || b.y2 <= 0.0 || b.x1 >= double(frame.width) || b.y1 >= double(frame.height))
        throw DataError("bounding box lies entirely outside the frame");
}

}  // namespace

CropWindow static_window(const BoundingBox& b, const CropConfig& cfg) {
    const long x0 = round_edge(b.center_x() - 0.5 * double(cfg.static_width));
    const long y0 = round_edge(b.center_y() - 0.5 * double(cfg.static_height));
    return {x0, y0, x0 + long(cfg.static_width), y0 + long(cfg.static_height)};
}

CropWindow dynamic_window(const BoundingBox& b, const CropConfig& cfg) {
    const double m = cfg.dynamic_margin_fraction * b.height();
    CropWindow w{round_edge(b.x1 - m), round_edge(b.y1 - m), round_edge(b.x2 + m), round_edge(b.y2 + m)};
    // Sub-pixel boxes can round to an empty window.
    if (w.x1 <= w.x0) w.x1 = w.x0 + 1;
    if (w.y1 <= w.y0) w.y1 = w.y0 + 1;
    return w;
}

CropWindow crop_window(const BoundingBox& bbox, const CropConfig& cfg) {
    return cfg.mode == CropMode::Static ? static_window(bbox, cfg) : dynamic_window(bbox, cfg);
}

Image extract_window(const Image& frame, const CropWindow& w, std::uint8_t pad) {
    Image out(std::size_t(w.width()), std::size_t(w.height()), frame.channels, pad);
    const long fx0 = std::max(w.x0, 0L), fx1 = std::min(w.x1, long(frame.width));
    const long fy0 = std::max(w.y0, 0L), fy1 = std::min(w.y1, long(frame.height));
    if (fx0 >= fx1) return out;
    const std::size_t run = std::size_t(fx1 - fx0) * frame.channels;
    for (long y = fy0; y < fy1; ++y) {
        const auto* src = &frame.pixels[(std::size_t(y) * frame.width + std::size_t(fx0)) * frame.channels];
        auto* dst = &out.pixels[(std::size_t(y - w.y0) * out.width + std::size_t(fx0 - w.x0)) * out.channels];
        std::copy_n(src, run, dst);
    }
    return out;
}

Image static_crop(const Image& frame, const BoundingBox& bbox, const CropConfig& cfg) {
    require_intersects(frame, bbox);
    if (bbox.width() >= double(cfg.static_width) || bbox.height() >= double(cfg.static_height))
        log_warn("bounding box " + std::to_string(bbox.width()) + "x" + std::to_string(bbox.height()) +
                 " is not smaller than the static crop; cropping anyway");
    return extract_window(frame, static_window(bbox, cfg), cfg.pad_value);
}

Image dynamic_crop(const Image& frame, const BoundingBox& bbox, const CropConfig& cfg) {
    require_intersects(frame, bbox);
    return extract_window(frame, dynamic_window(bbox, cfg), cfg.pad_value);
}

Image resize_bilinear(const Image& img, std::size_t out_w, std::size_t out_h) {
    if (img.empty() || out_w == 0 || out_h == 0) throw DataError("cannot resize an empty image");
    if (img.width == out_w && img.height == out_h) return img;
    Image out(out_w, out_h, img.channels);
    const double sx = double(img.width) / double(out_w);
    const double sy = double(img.height) / double(out_h);
    auto sample = [](double src, std::size_t n, std::size_t& i0, std::size_t& i1, double& f) {
        src = std::clamp(src, 0.0, double(n - 1));
        i0 = static_cast<std::size_t>(std::floor(src));
        i1 = std::min(i0 + 1, n - 1);
        f = src - double(i0);
    };
    for (std::size_t y = 0; y < out_h; ++y) {
        std::size_t y0, y1;
        double fy;
        sample((double(y) + 0.5) * sy - 0.5, img.height, y0, y1, fy);
        for (std::size_t x = 0; x < out_w; ++x) {
            std::size_t x0, x1;
            double fx;
            sample((double(x) + 0.5) * sx - 0.5, img.width, x0, x1, fx);
            for (std::size_t c = 0; c < img.channels; ++c) {
                const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
                const double bot = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
                const double v = (1.0 - fy) * top + fy * bot;
                out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
            }
        }
    }
    return out;
}

CropWindow letterbox_content_box(std::size_t w, std::size_t h, std::size_t S) {
    const double scale = double(S) / double(std::max(w, h));
    const long cw = std::clamp(round_edge(double(w) * scale), 1L, long(S));
    const long ch = std::clamp(round_edge(double(h) * scale), 1L, long(S));
    const long left = (long(S) - cw) / 2;
    const long top = (long(S) - ch) / 2;
    return {left, top, left + cw, top + ch};
}

Image letterbox_to_model_input(const Image& img, const CropConfig& cfg) {
    if (img.empty()) throw DataError("cannot letterbox an empty image");
    const std::size_t S = cfg.model_input_size;
    if (img.width == S && img.height == S) return img;
    const auto box = letterbox_content_box(img.width, img.height, S);
    const Image scaled = resize_bilinear(img, std::size_t(box.width()), std::size_t(box.height()));
    Image out(S, S, img.channels, cfg.pad_value);
    for (std::size_t y = 0; y < scaled.height; ++y)
        std::copy_n(&scaled.pixels[y * scaled.width * scaled.channels], scaled.width * scaled.channels,
                    &out.pixels[((std::size_t(box.y0) + y) * S + std::size_t(box.x0)) * out.channels]);
    return out;
}

Image crop_for_model(const Image& frame, const BoundingBox& bbox, const CropConfig& cfg) {
    if (cfg.mode == CropMode::Static)
        return resize_bilinear(static_crop(frame, bbox, cfg), cfg.model_input_size, cfg.model_input_size);
    return letterbox_to_model_input(dynamic_crop(frame, bbox, cfg), cfg);
}

CropClip flip_clip(const CropClip& clip) {
    CropClip out = clip;
    for (auto& f : out.frames) f = flip_horizontal(f);
    return out;
}

}  // namespace pedx
