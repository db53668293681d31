#include "pedx/trackdata.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pedx/error.hpp"
#include "pedx/image.hpp"

namespace pedx {

using nlohmann::ordered_json;

bool BoundingBox::valid() const noexcept {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) && x2 > x1 && y2 > y1;
}

BoundingBox flip_bbox(const BoundingBox& b, double image_width) noexcept {
    return {image_width - b.x2, b.y1, image_width - b.x1, b.y2};
}

std::string_view to_string(Label label) noexcept {
    return label == Label::Crossing ? "crossing" : "non_crossing";
}

std::string_view to_string(SplitTag tag) noexcept {
    switch (tag) {
        case SplitTag::Train: return "train";
        case SplitTag::Test: return "test";
        case SplitTag::Unassigned: break;
    }
    return "unassigned";
}

Label parse_label(std::string_view s) {
    if (s == "crossing") return Label::Crossing;
    if (s == "non_crossing") return Label::NonCrossing;
    throw DataError("unknown label '" + std::string(s) + "'");
}

SplitTag parse_split(std::string_view s) {
    if (s == "train") return SplitTag::Train;
    if (s == "test") return SplitTag::Test;
    if (s == "unassigned") return SplitTag::Unassigned;
    throw DataError("unknown split '" + std::string(s) + "'");
}

std::ptrdiff_t PedestrianTrack::find_frame(std::int64_t frame_index) const {
    // frames are strictly increasing, so binary search.
    std::size_t lo = 0, hi = frames.size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (frames[mid].ref.frame_index < frame_index) lo = mid + 1;
        else hi = mid;
    }
    return (lo < frames.size() && frames[lo].ref.frame_index == frame_index) ? std::ptrdiff_t(lo) : -1;
}

const PedestrianTrack& Manifest::track(std::string_view id) const {
    for (const auto& t : tracks)
        if (t.track_id == id) return t;
    throw DataError("unknown track '" + std::string(id) + "'");
}

void validate_track(const PedestrianTrack& t) {
    auto fail = [&](const std::string& field, const std::string& why) {
        throw DataError("track '" + t.track_id + "': " + field + ": " + why);
    };
    if (t.track_id.empty()) throw DataError("track with empty track_id");
    if (t.image_width == 0 || t.image_height == 0) fail("image_size", "must be positive");
    if (t.frames.empty()) fail("frames", "empty");
    for (std::size_t i = 0; i < t.frames.size(); ++i) {
        const auto& f = t.frames[i];
        const std::string where = "frames[" + std::to_string(i) + "]";
        if (f.ref.frame_index < 0) fail(where + ".idx", "negative");
        if (i > 0 && f.ref.frame_index <= t.frames[i - 1].ref.frame_index) fail(where + ".idx", "not strictly increasing");
        if (!f.bbox.valid()) fail(where + ".bbox", "requires finite x1 < x2 and y1 < y2");
    }
    if (t.label == Label::NonCrossing && t.event_frame != t.last_frame())
        fail("event_frame", "non-crossing tracks must use the last observable frame");
    if (t.label == Label::Crossing && t.event_frame < t.first_frame())
        fail("event_frame", "crossing event precedes the first frame");
}

void validate_manifest(const Manifest& m) {
    std::set<std::string> ids;
    for (const auto& t : m.tracks) {
        validate_track(t);
        if (!ids.insert(t.track_id).second) throw DataError("duplicate track_id '" + t.track_id + "'");
    }
}

std::string track_to_json_line(const PedestrianTrack& t) {
    ordered_json j;
    j["track_id"] = t.track_id;
    j["label"] = to_string(t.label);
    j["event_frame"] = t.event_frame;
    j["image_size"] = {t.image_width, t.image_height};
    auto frames = ordered_json::array();
    for (const auto& f : t.frames) {
        ordered_json fj;
        fj["idx"] = f.ref.frame_index;
        fj["path"] = f.ref.image_path;
        fj["bbox"] = {f.bbox.x1, f.bbox.y1, f.bbox.x2, f.bbox.y2};
        frames.push_back(std::move(fj));
    }
    j["frames"] = std::move(frames);
    if (t.split != SplitTag::Unassigned) j["split"] = to_string(t.split);
    return j.dump();
}

PedestrianTrack track_from_json_line(std::string_view line) {
    const auto j = ordered_json::parse(line);
    PedestrianTrack t;
    t.track_id = j.at("track_id").get<std::string>();
    t.label = parse_label(j.at("label").get<std::string>());
    t.event_frame = j.at("event_frame").get<std::int64_t>();
    const auto& size = j.at("image_size");
    if (!size.is_array() || size.size() != 2) throw DataError("image_size must be [w, h]");
    t.image_width = size[0].get<std::size_t>();
    t.image_height = size[1].get<std::size_t>();
    for (const auto& fj : j.at("frames")) {
        TrackFrame f;
        f.ref.frame_index = fj.at("idx").get<std::int64_t>();
        f.ref.image_path = fj.at("path").get<std::string>();
        const auto& b = fj.at("bbox");
        if (!b.is_array() || b.size() != 4) throw DataError("bbox must be [x1, y1, x2, y2]");
        f.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
        t.frames.push_back(std::move(f));
    }
    if (j.contains("split")) t.split = parse_split(j.at("split").get<std::string>());
    return t;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest " + path.string());
    Manifest m;
    m.base_dir = path.parent_path();
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            m.tracks.push_back(track_from_json_line(line));
            validate_track(m.tracks.back());
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": parse error: " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    validate_manifest(m);
    return m;
}

void write_manifest(const Manifest& m, const std::filesystem::path& path) {
    validate_manifest(m);
    std::ostringstream os;
    for (const auto& t : m.tracks) os << track_to_json_line(t) << '\n';
    write_text_atomic(path, os.str());
}

}  // namespace pedx
