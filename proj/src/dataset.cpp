#include "pedx/dataset.hpp"

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "pedx/clipstore.hpp"
#include "pedx/error.hpp"
#include "pedx/image.hpp"

namespace pedx {

FrameSource disk_frames(const Manifest& m) {
    const auto base = m.base_dir;
    return [base](const PedestrianTrack&, const TrackFrame& f) { return read_png(base / f.ref.image_path); };
}

CropClip make_clip(const PedestrianTrack& track, const ObservationWindow& w, const CropConfig& cfg,
                   const FrameSource& frames) {
    CropClip clip;
    clip.track_id = track.track_id;
    clip.mode = cfg.mode;
    clip.frame_indices = w.frame_indices;
    clip.size = cfg.model_input_size;
    for (auto idx : w.frame_indices) {
        const auto pos = track.find_frame(idx);
        if (pos < 0) throw DataError("track " + track.track_id + " has no frame " + std::to_string(idx));
        const auto& tf = track.frames[std::size_t(pos)];
        Image img = frames(track, tf);
        if (img.channels != 3) throw DataError("frame " + tf.ref.image_path + " is not RGB");
        clip.frames.push_back(crop_for_model(img, tf.bbox, cfg));
    }
    return clip;
}

std::vector<Sample> make_samples(const std::vector<ObservationWindow>& windows, const ClipLookup& lookup) {
    std::map<std::string, std::shared_ptr<const CropClip>> cache;
    std::vector<Sample> out;
    out.reserve(windows.size());
    for (const auto& w : windows) {
        const std::string id = w.sample_id();
        auto it = cache.find(id);
        if (it == cache.end()) {
            auto clip = lookup(w);
            if (!clip) throw DataError("no clip for sample " + id);
            it = cache.emplace(id, std::move(clip)).first;
        }
        out.push_back({id, w.label == Label::Crossing ? 1 : 0, w.flipped, it->second});
    }
    return out;
}

std::vector<ObservationWindow> split_windows(const Manifest& m, const SamplingConfig& cfg, double train_ratio) {
    const TrackSplit s =
        has_split_tags(m) ? split_from_tags(m) : split_random(m, train_ratio, 1.0 - train_ratio, cfg.seed);
    std::vector<SplitTag> tag(m.tracks.size(), SplitTag::Unassigned);
    for (auto i : s.train) tag[i] = SplitTag::Train;
    for (auto i : s.test) tag[i] = SplitTag::Test;
    std::vector<ObservationWindow> out;
    for (std::size_t i = 0; i < m.tracks.size(); ++i) {
        if (tag[i] == SplitTag::Unassigned) continue;
        for (auto& w : enumerate_windows(m.tracks[i], cfg)) {
            w.split = tag[i];
            out.push_back(std::move(w));
        }
    }
    return out;
}

ClipStore ClipStore::open(const std::filesystem::path& dir) {
    ClipStore s;
    s.dir = dir;
    const auto cfg_path = dir / "preprocess.json";
    if (!std::filesystem::exists(cfg_path)) throw DataError(dir.string() + " is not a clip store (no preprocess.json)");
    try {
        const auto bytes = read_file(cfg_path);
        const auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
        s.mode = parse_crop_mode(j.at("crop").at("mode").get<std::string>());
        s.input_size = j.at("crop").at("model_input_size").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad " + cfg_path.string() + ": " + e.what());
    }
    s.windows = read_window_list(dir / "windows.jsonl");
    return s;
}

std::shared_ptr<const CropClip> ClipStore::load(const ObservationWindow& w) const {
    auto clip = std::make_shared<CropClip>(read_clip(dir / "clips" / clip_file_name(w.sample_id())));
    if (clip->mode != mode || clip->size != input_size || clip->frame_indices != w.frame_indices)
        throw DataError("clip for " + w.sample_id() + " does not match the store configuration");
    return clip;
}

std::vector<ObservationWindow> ClipStore::split(SplitTag tag) const {
    std::vector<ObservationWindow> out;
    for (const auto& w : windows)
        if (w.split == tag) out.push_back(w);
    return out;
}

ClipStore write_clip_store(const Manifest& m, const SamplingConfig& scfg, const CropConfig& ccfg,
                           const std::filesystem::path& dir, std::size_t workers, const std::string& extra_config_json) {
    ccfg.validate();
    std::filesystem::create_directories(dir / "clips");
    const auto windows = split_windows(m, scfg);
    if (windows.empty()) throw DataError("no admissible observation windows in the manifest");

    const FrameSource frames = disk_frames(m);
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    std::exception_ptr err;
    auto work = [&] {
        for (std::size_t i = next++; i < windows.size(); i = next++) {
            try {
                const auto& w = windows[i];
                write_clip(make_clip(m.track(w.track_id), w, ccfg, frames), dir / "clips" / clip_file_name(w.sample_id()));
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!err) err = std::current_exception();
                next = windows.size();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::max<std::size_t>(workers, 1); ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);

    write_window_list(windows, dir / "windows.jsonl");
    nlohmann::ordered_json j;
    j["crop"] = {{"mode", to_string(ccfg.mode)},
                 {"static_width", ccfg.static_width},
                 {"static_height", ccfg.static_height},
                 {"dynamic_margin_fraction", ccfg.dynamic_margin_fraction},
                 {"model_input_size", ccfg.model_input_size},
                 {"pad_value", ccfg.pad_value}};
    j["sampling"] = {{"obs_len_frames", scfg.obs_len_frames}, {"stride", scfg.stride},
                     {"tte_min", scfg.tte_min},               {"tte_max", scfg.tte_max},
                     {"seed", scfg.seed},                     {"windows_per_track", scfg.windows_per_track}};
    j["windows"] = windows.size();
    j["config"] = nlohmann::ordered_json::parse(extra_config_json);
    write_text_atomic(dir / "preprocess.json", j.dump(2) + "\n");
    return ClipStore::open(dir);
}

}  // namespace pedx
