#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pedx/dataset.hpp"
#include "pedx/image.hpp"
#include "pedx/trackdata.hpp"

namespace pedx {

enum class Motion { Crossing, Standing, Parallel };

// Axis-aligned pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
    long x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool empty() const noexcept { return x1 <= x0 || y1 <= y0; }
};

// One synthetic scene. Geometry is in pixels of the rendered frame; the road
// lies above `curb_y`, the sidewalk below it.
struct ScenarioSpec {
    std::size_t width = 64;
    std::size_t height = 64;
    std::size_t frames = 61;
    Label label = Label::NonCrossing;
    Motion motion = Motion::Standing;
    std::int64_t event_frame = 60;

    double curb_y = 20.0;
    // Figure: head top-center at (x, top) on frame 0, moving (vx, vy) px/frame.
    double figure_x = 32.0;
    double figure_top = 30.0;
    double vx = 0.0;
    double vy = 0.0;
    double figure_height = 16.0;
    double gait_period = 12.0;  // frames per stride cycle
    double gait_amplitude = 3.0;
    double gait_phase = 0.0;
    std::uint8_t shirt[3] = {180, 40, 40};
    std::uint8_t pants[3] = {30, 30, 90};

    bool marker_present = false;
    PixelRect marker;  // striped crosswalk band
    double cue_bias = 1.0;  // informational: rho of the dataset this came from

    std::uint64_t background_seed = 0;
    double noise_amplitude = 0.0;  // per-pixel uniform noise, in u8 steps

    void validate() const;
};

// Per-frame ground truth. figure/head/legs/marker are 0/1 masks (1 channel).
struct FrameMasks {
    Image figure;
    Image head;
    Image legs;
    Image marker;
};

struct RenderedClip {
    std::vector<Image> frames;
    std::vector<BoundingBox> bboxes;
    std::vector<FrameMasks> masks;
    PedestrianTrack track;  // frame paths left empty
};

RenderedClip generate_scenario(const ScenarioSpec& spec, std::uint64_t seed);

struct SynthConfig {
    std::size_t n = 256;
    double rho = 1.0;          // P(marker present == crossing label)
    double class_ratio = 0.5;  // fraction of crossing tracks
    std::uint64_t seed = 0;
    std::size_t image_size = 64;
    std::size_t frames = 61;
    double noise = 0.0;

    void validate() const;
};

// Scenario plan for a dataset; deterministic in cfg.
std::vector<ScenarioSpec> plan_dataset(const SynthConfig& cfg);

// Manifest for the planned dataset with frame paths
// "frames/<track_id>/<idx>.png"; nothing is written.
Manifest make_dataset(const SynthConfig& cfg);

// Renders and writes frames (and mask files if requested) plus
// manifest.jsonl under `out_dir`. Mask files "masks/<track_id>/<idx>.png"
// are RGB: R figure, G head (255) / legs (128), B marker.
Manifest write_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir, bool write_masks);

// Seed used to render track i of a dataset.
std::uint64_t synth_render_seed(std::uint64_t dataset_seed, std::size_t i);

// In-memory view of a synthetic dataset: frames and masks are rendered on
// demand, the most recent track is cached. Thread-safe.
class SynthFrames {
public:
    explicit SynthFrames(const SynthConfig& cfg);
    const Manifest& manifest() const noexcept { return manifest_; }
    std::shared_ptr<const RenderedClip> render(const std::string& track_id) const;
    FrameSource source() const;

private:
    SynthConfig cfg_;
    std::vector<ScenarioSpec> specs_;
    Manifest manifest_;
    mutable std::mutex mu_;
    mutable std::string cached_id_;
    mutable std::shared_ptr<const RenderedClip> cached_;
};

// Static crop side that keeps the crosswalk band inside the crop margin for
// frames of this size.
std::size_t synth_static_crop_size(std::size_t image_size);

// Decoders for the mask file channels.
FrameMasks decode_mask_image(const Image& rgb);
Image encode_mask_image(const FrameMasks& m);

std::string synth_track_id(std::size_t i);
std::string synth_frame_path(const std::string& track_id, std::int64_t idx);
std::string synth_mask_path(const std::string& track_id, std::int64_t idx);

}  // namespace pedx
