#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pedx/cropper.hpp"
#include "pedx/sampler.hpp"
#include "pedx/trackdata.hpp"

namespace pedx {

// Full-resolution frame for one entry of a track.
using FrameSource = std::function<Image(const PedestrianTrack&, const TrackFrame&)>;

// Reads PNG frames relative to the manifest directory.
FrameSource disk_frames(const Manifest& m);

// Crops every frame of an (unflipped) window and brings it to S x S.
CropClip make_clip(const PedestrianTrack& track, const ObservationWindow& w, const CropConfig& cfg,
                   const FrameSource& frames);

// One model input: a shared clip plus the mirror flag of the window.
struct Sample {
    std::string id;  // window sample id; flipped twins share it
    int label = 0;
    bool flipped = false;
    std::shared_ptr<const CropClip> clip;
};

// Pairs windows with clips looked up by sample id. Throws DataError when a
// clip is missing.
using ClipLookup = std::function<std::shared_ptr<const CropClip>(const ObservationWindow&)>;
std::vector<Sample> make_samples(const std::vector<ObservationWindow>& windows, const ClipLookup& lookup);

// Windows of all tracks with their split tags set. Manifest tags win when
// present; otherwise a seeded 0.7 / 0.3 track split.
std::vector<ObservationWindow> split_windows(const Manifest& m, const SamplingConfig& cfg, double train_ratio = 0.7);

// Preprocessed directory:
//   windows.jsonl      window list (unflipped, split tags set)
//   clips/<id>.clip    one clip per window
//   preprocess.json    effective crop and sampling config
struct ClipStore {
    std::filesystem::path dir;
    std::vector<ObservationWindow> windows;
    CropMode mode = CropMode::Dynamic;
    std::size_t input_size = 0;

    static ClipStore open(const std::filesystem::path& dir);
    std::shared_ptr<const CropClip> load(const ObservationWindow& w) const;
    std::vector<ObservationWindow> split(SplitTag tag) const;
};

// Writes a clip store; `workers` threads crop in parallel. The output bytes do
// not depend on the worker count.
ClipStore write_clip_store(const Manifest& m, const SamplingConfig& scfg, const CropConfig& ccfg,
                           const std::filesystem::path& dir, std::size_t workers = 1,
                           const std::string& extra_config_json = "{}");

}  // namespace pedx
