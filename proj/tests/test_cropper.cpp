#include <cmath>
#include <map>

#include "doctest.h"
#include "pedx/cropper.hpp"
#include "pedx/error.hpp"
#include "pedx/rng.hpp"

using namespace pedx;

namespace {

Image random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
    Rng rng(seed);
    Image img(w, h, 3);
    for (auto& p : img.pixels) p = std::uint8_t(rng.below(256));
    return img;
}

long half_away(double v) { return v >= 0 ? long(std::floor(v + 0.5)) : -long(std::floor(-v + 0.5)); }

struct RefWindow {
    long x0, y0, x1, y1;
};

RefWindow ref_window(const BoundingBox& b, const CropConfig& cfg) {
    if (cfg.mode == CropMode::Static) {
        const double cx = (b.x1 + b.x2) / 2, cy = (b.y1 + b.y2) / 2;
        const long x0 = half_away(cx - double(cfg.static_width) / 2);
        const long y0 = half_away(cy - double(cfg.static_height) / 2);
        return {x0, y0, x0 + long(cfg.static_width), y0 + long(cfg.static_height)};
    }
    const double m = cfg.dynamic_margin_fraction * (b.y2 - b.y1);
    return {half_away(b.x1 - m), half_away(b.y1 - m), half_away(b.x2 + m), half_away(b.y2 + m)};
}

// Pixel-by-pixel reference crop.
Image ref_crop(const Image& frame, const RefWindow& w, std::uint8_t pad) {
    Image out(std::size_t(w.x1 - w.x0), std::size_t(w.y1 - w.y0), 3);
    for (long y = w.y0; y < w.y1; ++y)
        for (long x = w.x0; x < w.x1; ++x)
            for (std::size_t c = 0; c < 3; ++c) {
                const bool inside = x >= 0 && y >= 0 && x < long(frame.width) && y < long(frame.height);
                out.at(std::size_t(x - w.x0), std::size_t(y - w.y0), c) =
                    inside ? frame.at(std::size_t(x), std::size_t(y), c) : pad;
            }
    return out;
}

std::size_t count_pad_pixels(const RefWindow& w, std::size_t fw, std::size_t fh) {
    std::size_t n = 0;
    for (long y = w.y0; y < w.y1; ++y)
        for (long x = w.x0; x < w.x1; ++x)
            if (x < 0 || y < 0 || x >= long(fw) || y >= long(fh)) ++n;
    return n;
}

}  // namespace

TEST_CASE("static crop") {
    CropConfig cfg;
    cfg.mode = CropMode::Static;
    SUBCASE("window arithmetic") {
        const auto w = static_window({950, 500, 970, 560}, cfg);
        CHECK(w == CropWindow{660, 230, 1260, 830});
    }
    SUBCASE("padded pixel count near the corner") {
        const Image frame(1920, 1080, 3, 7);
        cfg.pad_value = 0;
        const BoundingBox b{90, 80, 110, 120};
        const Image out = static_crop(frame, b, cfg);
        REQUIRE(out.width == 600);
        REQUIRE(out.height == 600);
        std::size_t padded = 0;
        for (std::size_t i = 0; i < out.pixels.size(); i += 3) padded += out.pixels[i] == 0;
        const std::size_t oracle = count_pad_pixels(ref_window(b, cfg), 1920, 1080);
        CHECK(oracle == 600 * 600 - 400 * 400);
        CHECK(padded == oracle);
    }
    SUBCASE("centered on the image corner pads three quadrants") {
        const Image frame(800, 800, 3, 200);
        const Image out = static_crop(frame, {-10, -10, 10, 10}, cfg);
        for (std::size_t y = 0; y < 600; y += 7)
            for (std::size_t x = 0; x < 600; x += 7) CHECK((out.at(x, y, 0) == 200) == (x >= 300 && y >= 300));
    }
    SUBCASE("shape is fixed wherever the box lies") {
        const Image frame = random_image(97, 61, 3);
        Rng rng(11);
        for (int i = 0; i < 50; ++i) {
            const double x = rng.uniform(-2.5, 95), y = rng.uniform(-3.5, 60);
            cfg.static_width = 1 + rng.below(80);
            cfg.static_height = 1 + rng.below(80);
            const Image out = static_crop(frame, {x, y, x + 3, y + 4}, cfg);
            CHECK(out.width == cfg.static_width);
            CHECK(out.height == cfg.static_height);
        }
    }
    SUBCASE("box entirely outside") {
        const Image frame(100, 100, 3);
        CHECK_THROWS_AS(static_crop(frame, {150, 10, 160, 20}, cfg), DataError);
        CHECK_THROWS_AS(static_crop(frame, {-30, 10, -20, 20}, cfg), DataError);
    }
    SUBCASE("oversized box still crops") {
        cfg.static_width = cfg.static_height = 10;
        const Image frame = random_image(40, 40, 1);
        const Image out = static_crop(frame, {5, 5, 35, 35}, cfg);
        CHECK(out.width == 10);
    }
}

TEST_CASE("dynamic crop") {
    CropConfig cfg;
    cfg.mode = CropMode::Dynamic;
    SUBCASE("five percent margin on every side") {
        const auto w = dynamic_window({100, 100, 140, 200}, cfg);
        CHECK(w == CropWindow{95, 95, 145, 205});
        CHECK(w.width() == 50);
        CHECK(w.height() == 110);
    }
    SUBCASE("zero margin is the rounded box") {
        cfg.dynamic_margin_fraction = 0;
        CHECK(dynamic_window({10.4, 20.5, 30.6, 41.49}, cfg) == CropWindow{10, 21, 31, 41});
    }
    SUBCASE("flush with the right edge") {
        const Image frame = random_image(200, 300, 5);
        const BoundingBox b{160, 100, 200, 200};
        const Image out = dynamic_crop(frame, b, cfg);
        const RefWindow w = ref_window(b, cfg);
        CHECK(out == ref_crop(frame, w, 0));
        for (long x = 200; x < w.x1; ++x)
            for (std::size_t y = 0; y < out.height; ++y)
                for (std::size_t c = 0; c < 3; ++c) CHECK(out.at(std::size_t(x - w.x0), y, c) == 0);
    }
    SUBCASE("window contains the rounded box") {
        Rng rng(21);
        for (int i = 0; i < 300; ++i) {
            const double x = rng.uniform(-20, 200), y = rng.uniform(-20, 200);
            const BoundingBox b{x, y, x + rng.uniform(0.5, 80), y + rng.uniform(0.5, 120)};
            cfg.dynamic_margin_fraction = rng.uniform(0, 0.3);
            const auto w = dynamic_window(b, cfg);
            CHECK(w.x0 <= half_away(b.x1));
            CHECK(w.y0 <= half_away(b.y1));
            CHECK(w.x1 >= half_away(b.x2));
            CHECK(w.y1 >= half_away(b.y2));
        }
    }
}

TEST_CASE("crops agree with a per-pixel reference") {
    Rng rng(99);
    for (int i = 0; i < 500; ++i) {
        const std::size_t fw = 8 + rng.below(120), fh = 8 + rng.below(120);
        const Image frame = random_image(fw, fh, 1000 + std::uint64_t(i));
        CropConfig cfg;
        cfg.mode = rng.uniform() < 0.5 ? CropMode::Static : CropMode::Dynamic;
        cfg.static_width = 1 + rng.below(90);
        cfg.static_height = 1 + rng.below(90);
        cfg.dynamic_margin_fraction = rng.uniform(0, 0.2);
        cfg.pad_value = std::uint8_t(rng.below(256));
        const double x1 = rng.uniform(-30, double(fw) - 1), y1 = rng.uniform(-30, double(fh) - 1);
        const BoundingBox b{x1, y1, std::max(x1 + rng.uniform(1, 60), 0.5), std::max(y1 + rng.uniform(1, 60), 0.5)};
        const RefWindow w = ref_window(b, cfg);
        const Image got = cfg.mode == CropMode::Static ? static_crop(frame, b, cfg) : dynamic_crop(frame, b, cfg);
        const Image want = ref_crop(frame, w, cfg.pad_value);
        REQUIRE(got.width == want.width);
        REQUIRE(got.height == want.height);
        CHECK(got == want);
    }
}

TEST_CASE("horizontal flip commutes with centered static crops") {
    CropConfig cfg;
    cfg.mode = CropMode::Static;
    cfg.static_width = 20;
    cfg.static_height = 16;
    const Image frame = random_image(64, 48, 8);
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        // Integer centers keep the window exactly symmetric.
        const double cx = double(rng.below(64)), cy = double(rng.below(48));
        const BoundingBox b{cx - 3, cy - 5, cx + 3, cy + 5};
        const Image lhs = static_crop(flip_horizontal(frame), flip_bbox(b, 64), cfg);
        const Image rhs = flip_horizontal(static_crop(frame, b, cfg));
        CHECK(lhs == rhs);
    }
}

TEST_CASE("letterbox") {
    CropConfig cfg;
    SUBCASE("tall crop gets side padding") {
        cfg.model_input_size = 224;
        const auto box = letterbox_content_box(50, 110, 224);
        CHECK(box.height() == 224);
        CHECK(box.width() == 102);
        CHECK(box.x0 == 61);
        CHECK(224 - box.x1 == 61);
        const auto odd = letterbox_content_box(51, 110, 224);
        CHECK(odd.x0 == (224 - odd.width()) / 2);
        CHECK(224 - odd.x1 == odd.x0 + (224 - odd.width()) % 2);
    }
    SUBCASE("square input of the right size is returned unchanged") {
        cfg.model_input_size = 32;
        const Image img = random_image(32, 32, 2);
        CHECK(letterbox_to_model_input(img, cfg) == img);
    }
    SUBCASE("uniform input") {
        Rng rng(17);
        for (int i = 0; i < 40; ++i) {
            cfg.model_input_size = 8 + rng.below(60);
            cfg.pad_value = 3;
            const std::size_t w = 1 + rng.below(90), h = 1 + rng.below(90);
            const Image img(w, h, 3, 128);
            const Image out = letterbox_to_model_input(img, cfg);
            const auto box = letterbox_content_box(w, h, cfg.model_input_size);
            std::map<int, std::size_t> inside, outside;
            for (std::size_t y = 0; y < out.height; ++y)
                for (std::size_t x = 0; x < out.width; ++x) {
                    const bool in = long(x) >= box.x0 && long(x) < box.x1 && long(y) >= box.y0 && long(y) < box.y1;
                    (in ? inside : outside)[out.at(x, y, 0)]++;
                }
            CHECK(inside.size() == 1);
            CHECK(inside.begin()->first == 128);
            if (!outside.empty()) {
                CHECK(outside.size() == 1);
                CHECK(outside.begin()->first == 3);
            }
            CHECK(std::max(box.width(), box.height()) == long(cfg.model_input_size));
        }
    }
    SUBCASE("empty input") { CHECK_THROWS_AS(letterbox_to_model_input(Image(), cfg), DataError); }
}

TEST_CASE("bilinear resize") {
    SUBCASE("2x upsample of a ramp") {
        Image img(2, 1, 1);
        img.at(0, 0, 0) = 0;
        img.at(1, 0, 0) = 100;
        const Image out = resize_bilinear(img, 4, 1);
        // align-corners=false: sources -0.25, 0.25, 0.75, 1.25.
        CHECK(out.at(0, 0, 0) == 0);
        CHECK(out.at(1, 0, 0) == 25);
        CHECK(out.at(2, 0, 0) == 75);
        CHECK(out.at(3, 0, 0) == 100);
    }
    SUBCASE("2x downsample averages pairs") {
        Image img(4, 4, 1);
        for (std::size_t i = 0; i < 16; ++i) img.pixels[i] = std::uint8_t(i * 10);
        const Image out = resize_bilinear(img, 2, 2);
        CHECK(out.at(0, 0, 0) == 25);
        CHECK(out.at(1, 1, 0) == 125);
    }
}

TEST_CASE("crop for model") {
    CropConfig cfg;
    cfg.model_input_size = 16;
    const Image frame = random_image(64, 64, 9);
    cfg.mode = CropMode::Static;
    cfg.static_width = cfg.static_height = 32;
    const Image s = crop_for_model(frame, {20, 20, 30, 40}, cfg);
    CHECK(s.width == 16);
    CHECK(s.height == 16);
    cfg.mode = CropMode::Dynamic;
    const Image d = crop_for_model(frame, {20, 20, 30, 40}, cfg);
    CHECK(d.width == 16);
    CHECK(d.height == 16);
    CHECK(parse_crop_mode("static") == CropMode::Static);
    CHECK_THROWS_AS(parse_crop_mode("zoom"), UsageError);
}
