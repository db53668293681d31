#include "pedx/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "pedx/error.hpp"
#include "pedx/rng.hpp"

namespace pedx {

namespace {

struct Capsule {
    double ax, ay, bx, by, r;

    bool contains(double px, double py) const {
        const double dx = bx - ax, dy = by - ay;
        const double len2 = dx * dx + dy * dy;
        double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double cx = ax + t * dx - px, cy = ay + t * dy - py;
        return cx * cx + cy * cy <= r * r;
    }
};

struct FigurePose {
    Capsule head, torso, left_leg, right_leg;
    BoundingBox bbox;
};

constexpr std::uint8_t kSkin[3] = {225, 185, 145};
constexpr std::uint8_t kStripe[3] = {235, 235, 235};
constexpr std::uint8_t kStripeGap[3] = {55, 55, 60};

FigurePose pose_at(const ScenarioSpec& s, std::int64_t t) {
    const double h = s.figure_height;
    const double x = s.figure_x + s.vx * double(t);
    const double top = s.figure_top + s.vy * double(t);
    const double phase = s.gait_phase + 2.0 * std::numbers::pi * double(t) / s.gait_period;
    const double leg_r = 0.08 * h;
    const double hip_y = top + 0.6 * h;
    const double foot_y = top + h - leg_r;
    double lx = x - 0.08 * h, rx = x + 0.08 * h, ly = foot_y, ry = foot_y;
    switch (s.motion) {
        case Motion::Crossing:
            // Walking toward the curb: feet alternately lift and swing outward.
            ly -= s.gait_amplitude * std::max(0.0, std::sin(phase));
            lx -= 0.5 * s.gait_amplitude * std::max(0.0, std::sin(phase));
            ry -= s.gait_amplitude * std::max(0.0, -std::sin(phase));
            rx += 0.5 * s.gait_amplitude * std::max(0.0, -std::sin(phase));
            break;
        case Motion::Parallel:
            // Walking along the sidewalk: legs scissor sideways.
            lx += s.gait_amplitude * std::sin(phase);
            rx -= s.gait_amplitude * std::sin(phase);
            break;
        case Motion::Standing: break;
    }
    FigurePose p;
    p.head = {x, top + 0.15 * h, x, top + 0.15 * h, 0.14 * h};
    p.torso = {x, top + 0.3 * h, x, hip_y, 0.1 * h};
    p.left_leg = {x - 0.06 * h, hip_y, lx, ly, leg_r};
    p.right_leg = {x + 0.06 * h, hip_y, rx, ry, leg_r};
    BoundingBox b{1e300, 1e300, -1e300, -1e300};
    for (const Capsule* c : {&p.head, &p.torso, &p.left_leg, &p.right_leg}) {
        b.x1 = std::min({b.x1, c->ax - c->r, c->bx - c->r});
        b.x2 = std::max({b.x2, c->ax + c->r, c->bx + c->r});
        b.y1 = std::min({b.y1, c->ay - c->r, c->by - c->r});
        b.y2 = std::max({b.y2, c->ay + c->r, c->by + c->r});
    }
    p.bbox = b;
    return p;
}

// Smooth low-amplitude texture: bilinear interpolation of a coarse random grid.
std::vector<double> texture(std::size_t w, std::size_t h, std::uint64_t seed) {
    constexpr std::size_t cell = 8;
    const std::size_t gw = w / cell + 2, gh = h / cell + 2;
    Rng rng(seed);
    std::vector<double> grid(gw * gh);
    for (auto& g : grid) g = rng.uniform(-1.0, 1.0);
    std::vector<double> out(w * h);
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            const double gx = double(x) / cell, gy = double(y) / cell;
            const auto x0 = std::size_t(gx), y0 = std::size_t(gy);
            const double fx = gx - double(x0), fy = gy - double(y0);
            const double top = (1 - fx) * grid[y0 * gw + x0] + fx * grid[y0 * gw + x0 + 1];
            const double bot = (1 - fx) * grid[(y0 + 1) * gw + x0] + fx * grid[(y0 + 1) * gw + x0 + 1];
            out[y * w + x] = (1 - fy) * top + fy * bot;
        }
    return out;
}

Image render_background(const ScenarioSpec& s) {
    Image img(s.width, s.height, 3);
    const auto tex = texture(s.width, s.height, s.background_seed);
    const double curb_half = std::max(1.0, s.height / 64.0);
    for (std::size_t y = 0; y < s.height; ++y)
        for (std::size_t x = 0; x < s.width; ++x) {
            const double py = double(y) + 0.5;
            std::array<double, 3> base;
            if (std::abs(py - s.curb_y) < curb_half) base = {200, 200, 195};
            else if (py < s.curb_y) base = {72, 72, 80};
            else base = {150, 140, 125};
            const double t = 10.0 * tex[y * s.width + x];
            for (std::size_t c = 0; c < 3; ++c) img.at(x, y, c) = std::uint8_t(std::clamp(base[c] + t, 0.0, 255.0));
        }
    if (s.marker_present) {
        const long stripe = std::max(1L, long(std::lround(2.0 * s.height / 64.0)));
        for (long y = std::max(0L, s.marker.y0); y < std::min(long(s.height), s.marker.y1); ++y) {
            const bool on = ((y - s.marker.y0) / stripe) % 2 == 0;
            for (long x = std::max(0L, s.marker.x0); x < std::min(long(s.width), s.marker.x1); ++x)
                for (std::size_t c = 0; c < 3; ++c)
                    img.at(std::size_t(x), std::size_t(y), c) = on ? kStripe[c] : kStripeGap[c];
        }
    }
    return img;
}

PixelRect marker_rect_for(double x, double curb_y, double h, std::size_t width) {
    const double left = x + 0.4 * h;
    const double x0 = (left + 0.5 * h <= double(width)) ? left : x - 0.9 * h;
    return {std::lround(x0), std::lround(curb_y - 0.75 * h), std::lround(x0 + 0.5 * h), std::lround(curb_y + 1.25 * h)};
}

}  // namespace

void ScenarioSpec::validate() const {
    if (width < 16 || height < 16) throw DataError("scenario image must be at least 16x16");
    if (!(figure_height > 2.0)) throw DataError("degenerate figure size");
    if (frames < 1) throw DataError("scenario needs at least one frame");
    if (!(gait_period > 0.0)) throw DataError("gait period must be positive");
}

RenderedClip generate_scenario(const ScenarioSpec& spec, std::uint64_t seed) {
    spec.validate();
    RenderedClip out;
    const Image background = render_background(spec);
    Rng noise(seed);
    Image marker_mask(spec.width, spec.height, 1, 0);
    if (spec.marker_present)
        for (long y = std::max(0L, spec.marker.y0); y < std::min(long(spec.height), spec.marker.y1); ++y)
            for (long x = std::max(0L, spec.marker.x0); x < std::min(long(spec.width), spec.marker.x1); ++x)
                marker_mask.at(std::size_t(x), std::size_t(y), 0) = 1;

    auto& track = out.track;
    track.label = spec.label;
    track.event_frame = spec.event_frame;
    track.image_width = spec.width;
    track.image_height = spec.height;

    for (std::size_t t = 0; t < spec.frames; ++t) {
        const FigurePose pose = pose_at(spec, std::int64_t(t));
        Image frame = background;
        FrameMasks m{Image(spec.width, spec.height, 1, 0), Image(spec.width, spec.height, 1, 0),
                     Image(spec.width, spec.height, 1, 0), marker_mask};
        const long bx0 = std::max(0L, long(std::floor(pose.bbox.x1)));
        const long bx1 = std::min(long(spec.width), long(std::ceil(pose.bbox.x2)) + 1);
        const long by0 = std::max(0L, long(std::floor(pose.bbox.y1)));
        const long by1 = std::min(long(spec.height), long(std::ceil(pose.bbox.y2)) + 1);
        for (long y = by0; y < by1; ++y)
            for (long x = bx0; x < bx1; ++x) {
                const double px = double(x) + 0.5, py = double(y) + 0.5;
                const std::uint8_t* color = nullptr;
                const auto ux = std::size_t(x), uy = std::size_t(y);
                if (pose.head.contains(px, py)) {
                    color = kSkin;
                    m.head.at(ux, uy, 0) = 1;
                } else if (pose.torso.contains(px, py)) {
                    color = spec.shirt;
                } else if (pose.left_leg.contains(px, py) || pose.right_leg.contains(px, py)) {
                    color = spec.pants;
                    m.legs.at(ux, uy, 0) = 1;
                }
                if (!color) continue;
                m.figure.at(ux, uy, 0) = 1;
                for (std::size_t c = 0; c < 3; ++c) frame.at(ux, uy, c) = color[c];
            }
        if (spec.noise_amplitude > 0.0)
            for (auto& p : frame.pixels)
                p = std::uint8_t(std::clamp(std::round(double(p) + noise.uniform(-1.0, 1.0) * spec.noise_amplitude), 0.0,
                                            255.0));
        out.frames.push_back(std::move(frame));
        out.masks.push_back(std::move(m));
        out.bboxes.push_back(pose.bbox);
        track.frames.push_back({{std::int64_t(t), ""}, pose.bbox});
    }
    return out;
}

void SynthConfig::validate() const {
    if (n < 4) throw UsageError("synthetic dataset needs n >= 4");
    if (!(rho >= 0.0 && rho <= 1.0)) throw UsageError("rho must lie in [0, 1]");
    if (image_size < 32) throw UsageError("synthetic image size must be >= 32");
    if (frames < 16) throw UsageError("synthetic tracks need at least 16 frames");
    const auto n_cross = std::size_t(std::lround(double(n) * class_ratio));
    if (!(class_ratio > 0.0 && class_ratio < 1.0) || n_cross == 0 || n_cross == n)
        throw DataError("class ratio " + std::to_string(class_ratio) + " is infeasible for n=" + std::to_string(n));
}

std::size_t synth_static_crop_size(std::size_t image_size) { return std::size_t(std::lround(0.75 * double(image_size))); }

std::string synth_track_id(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "syn_%05zu", i);
    return buf;
}

std::string synth_frame_path(const std::string& track_id, std::int64_t idx) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld.png", static_cast<long long>(idx));
    return "frames/" + track_id + "/" + buf;
}

std::string synth_mask_path(const std::string& track_id, std::int64_t idx) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld.png", static_cast<long long>(idx));
    return "masks/" + track_id + "/" + buf;
}

std::vector<ScenarioSpec> plan_dataset(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n;
    const auto n_cross = std::size_t(std::lround(double(n) * cfg.class_ratio));
    Rng rng(cfg.seed);

    std::vector<Label> labels(n, Label::NonCrossing);
    std::fill(labels.begin(), labels.begin() + long(n_cross), Label::Crossing);
    rng.shuffle(labels);

    // Exactly round(n_c * (1 - rho)) tracks per class get the marker flipped
    // against their label.
    std::vector<bool> marker(n);
    for (Label cls : {Label::Crossing, Label::NonCrossing}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (labels[i] == cls) idx.push_back(i);
        rng.shuffle(idx);
        const auto n_flip = std::size_t(std::lround(double(idx.size()) * (1.0 - cfg.rho)));
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const bool agrees = j >= n_flip;
            marker[idx[j]] = (cls == Label::Crossing) == agrees;
        }
    }

    const double s = double(cfg.image_size) / 64.0;
    const auto W = double(cfg.image_size), H = double(cfg.image_size);
    const auto last = std::int64_t(cfg.frames) - 1;
    std::vector<ScenarioSpec> specs;
    specs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rng r(Rng::derive(cfg.seed, i));
        ScenarioSpec sp;
        sp.width = sp.height = cfg.image_size;
        sp.frames = cfg.frames;
        sp.label = labels[i];
        sp.cue_bias = cfg.rho;
        sp.noise_amplitude = cfg.noise;
        sp.background_seed = r.next();
        sp.curb_y = r.uniform(17.0, 23.0) * s;
        sp.figure_height = r.uniform(15.0, 17.0) * s;
        sp.gait_period = r.uniform(9.0, 14.0);
        sp.gait_phase = r.uniform(0.0, 2.0 * std::numbers::pi);
        sp.gait_amplitude = r.uniform(0.28, 0.34) * sp.figure_height;
        for (int c = 0; c < 3; ++c) {
            sp.shirt[c] = std::uint8_t(r.uniform(20.0, 235.0));
            sp.pants[c] = std::uint8_t(r.uniform(15.0, 110.0));
        }
        const double h = sp.figure_height;
        if (sp.label == Label::Crossing) {
            sp.motion = Motion::Crossing;
            sp.event_frame = last + std::int64_t(r.below(16));
            const double v = r.uniform(0.3, 0.45) * s;
            sp.vy = -v;
            sp.figure_x = r.uniform(0.15, 0.6) * W;
            // Feet reach the curb exactly at the event frame.
            sp.figure_top = sp.curb_y - h + v * double(sp.event_frame);
        } else {
            sp.event_frame = last;
            sp.figure_top = r.uniform(sp.curb_y + 2.0 * s, H - h - 2.0 * s);
            if (r.uniform() < 0.5) {
                sp.motion = Motion::Standing;
                sp.figure_x = r.uniform(0.15, 0.85) * W;
            } else {
                sp.motion = Motion::Parallel;
                const double speed = r.uniform(0.25, 0.4) * s;
                const double travel = speed * double(last);
                const bool right = r.uniform() < 0.5;
                sp.vx = right ? speed : -speed;
                const double lo = 0.1 * W + (right ? 0.0 : travel);
                const double hi = 0.9 * W - (right ? travel : 0.0);
                sp.figure_x = r.uniform(lo, std::max(lo, hi));
            }
        }
        sp.marker_present = marker[i];
        if (sp.marker_present) sp.marker = marker_rect_for(sp.figure_x, sp.curb_y, h, cfg.image_size);
        specs.push_back(sp);
    }
    return specs;
}

namespace {

PedestrianTrack planned_track(const ScenarioSpec& sp, std::size_t i) {
    PedestrianTrack t;
    t.track_id = synth_track_id(i);
    t.label = sp.label;
    t.event_frame = sp.event_frame;
    t.image_width = sp.width;
    t.image_height = sp.height;
    for (std::size_t f = 0; f < sp.frames; ++f)
        t.frames.push_back({{std::int64_t(f), synth_frame_path(t.track_id, std::int64_t(f))},
                            pose_at(sp, std::int64_t(f)).bbox});
    return t;
}

}  // namespace

Manifest make_dataset(const SynthConfig& cfg) {
    const auto specs = plan_dataset(cfg);
    Manifest m;
    for (std::size_t i = 0; i < specs.size(); ++i) m.tracks.push_back(planned_track(specs[i], i));
    validate_manifest(m);
    return m;
}

FrameMasks decode_mask_image(const Image& rgb) {
    FrameMasks m{Image(rgb.width, rgb.height, 1, 0), Image(rgb.width, rgb.height, 1, 0),
                 Image(rgb.width, rgb.height, 1, 0), Image(rgb.width, rgb.height, 1, 0)};
    for (std::size_t y = 0; y < rgb.height; ++y)
        for (std::size_t x = 0; x < rgb.width; ++x) {
            m.figure.at(x, y, 0) = rgb.at(x, y, 0) > 127;
            m.head.at(x, y, 0) = rgb.at(x, y, 1) > 191;
            m.legs.at(x, y, 0) = rgb.at(x, y, 1) > 63 && rgb.at(x, y, 1) <= 191;
            m.marker.at(x, y, 0) = rgb.at(x, y, 2) > 127;
        }
    return m;
}

Image encode_mask_image(const FrameMasks& m) {
    Image rgb(m.figure.width, m.figure.height, 3, 0);
    for (std::size_t y = 0; y < rgb.height; ++y)
        for (std::size_t x = 0; x < rgb.width; ++x) {
            rgb.at(x, y, 0) = m.figure.at(x, y, 0) ? 255 : 0;
            rgb.at(x, y, 1) = m.head.at(x, y, 0) ? 255 : (m.legs.at(x, y, 0) ? 128 : 0);
            rgb.at(x, y, 2) = m.marker.at(x, y, 0) ? 255 : 0;
        }
    return rgb;
}

std::uint64_t synth_render_seed(std::uint64_t dataset_seed, std::size_t i) {
    return Rng::derive(dataset_seed ^ 0x5eed, i);
}

SynthFrames::SynthFrames(const SynthConfig& cfg) : cfg_(cfg), specs_(plan_dataset(cfg)) {
    for (std::size_t i = 0; i < specs_.size(); ++i) manifest_.tracks.push_back(planned_track(specs_[i], i));
}

std::shared_ptr<const RenderedClip> SynthFrames::render(const std::string& track_id) const {
    std::lock_guard lock(mu_);
    if (cached_ && cached_id_ == track_id) return cached_;
    for (std::size_t i = 0; i < specs_.size(); ++i)
        if (manifest_.tracks[i].track_id == track_id) {
            cached_ = std::make_shared<RenderedClip>(generate_scenario(specs_[i], synth_render_seed(cfg_.seed, i)));
            cached_id_ = track_id;
            return cached_;
        }
    throw DataError("no synthetic track " + track_id);
}

FrameSource SynthFrames::source() const {
    return [this](const PedestrianTrack& t, const TrackFrame& f) {
        const auto clip = render(t.track_id);
        return clip->frames.at(std::size_t(f.ref.frame_index - t.first_frame()));
    };
}

Manifest write_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir, bool write_masks) {
    namespace fs = std::filesystem;
    const auto specs = plan_dataset(cfg);
    Manifest m;
    m.base_dir = out_dir;
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        PedestrianTrack t = planned_track(specs[i], i);
        const RenderedClip clip = generate_scenario(specs[i], synth_render_seed(cfg.seed, i));
        fs::create_directories(out_dir / "frames" / t.track_id);
        if (write_masks) fs::create_directories(out_dir / "masks" / t.track_id);
        for (std::size_t f = 0; f < clip.frames.size(); ++f) {
            write_png(out_dir / t.frames[f].ref.image_path, clip.frames[f]);
            if (write_masks)
                write_png(out_dir / synth_mask_path(t.track_id, std::int64_t(f)), encode_mask_image(clip.masks[f]));
        }
        m.tracks.push_back(std::move(t));
    }
    write_manifest(m, out_dir / "manifest.jsonl");
    return m;
}

}  // namespace pedx
