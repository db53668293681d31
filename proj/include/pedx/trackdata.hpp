#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pedx {

// Pixel-space box: (x1, y1) upper-left, (x2, y2) lower-right.
struct BoundingBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    double width() const noexcept { return x2 - x1; }
    double height() const noexcept { return y2 - y1; }
    double center_x() const noexcept { return 0.5 * (x1 + x2); }
    double center_y() const noexcept { return 0.5 * (y1 + y2); }
    bool valid() const noexcept;
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Mirror a box across the vertical axis of an image of the given width.
BoundingBox flip_bbox(const BoundingBox& b, double image_width) noexcept;

enum class Label { NonCrossing = 0, Crossing = 1 };
enum class SplitTag { Unassigned, Train, Test };

std::string_view to_string(Label label) noexcept;
std::string_view to_string(SplitTag tag) noexcept;
Label parse_label(std::string_view s);
SplitTag parse_split(std::string_view s);

struct FrameRef {
    std::int64_t frame_index = 0;
    std::string image_path;  // relative to the manifest directory
    friend bool operator==(const FrameRef&, const FrameRef&) = default;
};

struct TrackFrame {
    FrameRef ref;
    BoundingBox bbox;
    friend bool operator==(const TrackFrame&, const TrackFrame&) = default;
};

struct PedestrianTrack {
    std::string track_id;
    std::vector<TrackFrame> frames;
    Label label = Label::NonCrossing;
    // Crossing start for crossing tracks; last observable frame otherwise.
    std::int64_t event_frame = 0;
    std::size_t image_width = 0;
    std::size_t image_height = 0;
    SplitTag split = SplitTag::Unassigned;

    std::int64_t first_frame() const { return frames.front().ref.frame_index; }
    std::int64_t last_frame() const { return frames.back().ref.frame_index; }
    // Index into `frames` of the given frame number, or -1.
    std::ptrdiff_t find_frame(std::int64_t frame_index) const;
    friend bool operator==(const PedestrianTrack&, const PedestrianTrack&) = default;
};

struct Manifest {
    std::vector<PedestrianTrack> tracks;
    std::filesystem::path base_dir;  // where relative image paths resolve

    std::filesystem::path resolve(const std::string& image_path) const { return base_dir / image_path; }
    const PedestrianTrack& track(std::string_view id) const;
};

// Throws DataError naming the track and the offending field.
void validate_track(const PedestrianTrack& track);
void validate_manifest(const Manifest& m);

// Line-delimited JSON, one track per line:
// {"track_id":..,"label":"crossing"|"non_crossing","event_frame":..,
//  "image_size":[w,h],"frames":[{"idx":..,"path":..,"bbox":[x1,y1,x2,y2]},..],
//  "split":"train"|"test"}   (split optional)
Manifest load_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& m, const std::filesystem::path& path);

std::string track_to_json_line(const PedestrianTrack& track);
PedestrianTrack track_from_json_line(std::string_view line);

}  // namespace pedx
