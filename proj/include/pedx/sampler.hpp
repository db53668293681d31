#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pedx/trackdata.hpp"

namespace pedx {

struct SamplingConfig {
    int obs_len_frames = 16;
    int stride = 2;
    int tte_min = 30;
    int tte_max = 60;
    std::uint64_t seed = 0;
    // 0 keeps every admissible window; n > 0 keeps a seeded random subset of
    // at most n windows per track.
    std::size_t windows_per_track = 0;

    int frames_per_window() const { return obs_len_frames / stride; }
    void validate() const;
};

struct ObservationWindow {
    std::string track_id;
    std::vector<std::int64_t> frame_indices;  // increasing, step `stride`, last = t_last
    Label label = Label::NonCrossing;
    std::int64_t tte = 0;
    bool flipped = false;
    SplitTag split = SplitTag::Unassigned;

    std::int64_t last_index() const { return frame_indices.back(); }
    // Stable id shared by a window and its flipped twin: "<track>@<t_last>".
    std::string sample_id() const;
    friend bool operator==(const ObservationWindow&, const ObservationWindow&) = default;
};

// Every t_last with A - t_last in [tte_min, tte_max] whose full stride
// pattern t_last - (obs_len - stride) .. t_last exists in the track and
// t_last - (obs_len - 1) >= first frame. Respects cfg.windows_per_track.
std::vector<ObservationWindow> enumerate_windows(const PedestrianTrack& track, const SamplingConfig& cfg);

struct TrackSplit {
    std::vector<std::size_t> train;    // indices into Manifest::tracks
    std::vector<std::size_t> test;
    std::vector<std::size_t> holdout;  // remainder, unused
};

// Track-level random split. Counts are floor(n * ratio).
TrackSplit split_random(const Manifest& m, double train_ratio, double test_ratio, std::uint64_t seed);
// Uses the manifest's own split tags (e.g. a dataset's default split).
TrackSplit split_from_tags(const Manifest& m);
bool has_split_tags(const Manifest& m);

// Flip every window (adding twins), then undersample the majority class
// without replacement down to the minority count. Order follows the
// augmented list.
std::vector<ObservationWindow> balance_training_set(const std::vector<ObservationWindow>& windows,
                                                    std::uint64_t seed);

// Window-list file: one JSON record per line
// {"track_id","frame_indices","label","tte","flipped","split"}.
void write_window_list(const std::vector<ObservationWindow>& windows, const std::filesystem::path& path);
std::vector<ObservationWindow> read_window_list(const std::filesystem::path& path);

std::uint64_t fnv1a(std::string_view s) noexcept;

}  // namespace pedx
