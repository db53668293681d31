#include "pedx/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pedx/error.hpp"
#include "pedx/image.hpp"
#include "pedx/rng.hpp"

namespace pedx {

using nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void SamplingConfig::validate() const {
    if (obs_len_frames <= 0 || stride <= 0) throw UsageError("observation length and stride must be positive");
    if (obs_len_frames % stride != 0) throw UsageError("observation length must be divisible by the stride");
    if (tte_min < 0 || tte_min > tte_max) throw UsageError("require 0 <= tte_min <= tte_max");
}

std::string ObservationWindow::sample_id() const { return track_id + "@" + std::to_string(last_index()); }

std::vector<ObservationWindow> enumerate_windows(const PedestrianTrack& track, const SamplingConfig& cfg) {
    cfg.validate();
    std::vector<ObservationWindow> out;
    if (track.frames.empty()) return out;
    const int k = cfg.frames_per_window();
    const std::int64_t lo = std::max<std::int64_t>(track.event_frame - cfg.tte_max,
                                                   track.first_frame() + cfg.obs_len_frames - 1);
    const std::int64_t hi = std::min<std::int64_t>(track.event_frame - cfg.tte_min, track.last_frame());
    for (std::int64_t t_last = lo; t_last <= hi; ++t_last) {
        ObservationWindow w;
        w.track_id = track.track_id;
        w.label = track.label;
        w.tte = track.event_frame - t_last;
        w.split = track.split;
        bool complete = true;
        for (int i = k - 1; i >= 0 && complete; --i) {
            const std::int64_t idx = t_last - std::int64_t(i) * cfg.stride;
            complete = track.find_frame(idx) >= 0;
            w.frame_indices.push_back(idx);
        }
        if (complete) out.push_back(std::move(w));
    }
    if (cfg.windows_per_track > 0 && out.size() > cfg.windows_per_track) {
        std::vector<std::size_t> idx(out.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        Rng rng(Rng::derive(cfg.seed, fnv1a(track.track_id)));
        rng.shuffle(idx);
        idx.resize(cfg.windows_per_track);
        std::sort(idx.begin(), idx.end());
        std::vector<ObservationWindow> kept;
        for (auto i : idx) kept.push_back(std::move(out[i]));
        out = std::move(kept);
    }
    return out;
}

TrackSplit split_random(const Manifest& m, double train_ratio, double test_ratio, std::uint64_t seed) {
    const std::size_t n = m.tracks.size();
    if (n < 2) throw DataError("a split needs at least 2 tracks, got " + std::to_string(n));
    if (train_ratio < 0 || test_ratio < 0 || train_ratio + test_ratio > 1.0 + 1e-12)
        throw UsageError("split ratios must be non-negative and sum to at most 1");
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(order);
    const auto n_train = static_cast<std::size_t>(std::floor(double(n) * train_ratio + 1e-9));
    const auto n_test = std::min(n - n_train, static_cast<std::size_t>(std::floor(double(n) * test_ratio + 1e-9)));
    TrackSplit s;
    s.train.assign(order.begin(), order.begin() + long(n_train));
    s.test.assign(order.begin() + long(n_train), order.begin() + long(n_train + n_test));
    s.holdout.assign(order.begin() + long(n_train + n_test), order.end());
    return s;
}

bool has_split_tags(const Manifest& m) {
    return std::any_of(m.tracks.begin(), m.tracks.end(), [](const auto& t) { return t.split != SplitTag::Unassigned; });
}

TrackSplit split_from_tags(const Manifest& m) {
    TrackSplit s;
    for (std::size_t i = 0; i < m.tracks.size(); ++i) {
        switch (m.tracks[i].split) {
            case SplitTag::Train: s.train.push_back(i); break;
            case SplitTag::Test: s.test.push_back(i); break;
            case SplitTag::Unassigned: s.holdout.push_back(i); break;
        }
    }
    return s;
}

std::vector<ObservationWindow> balance_training_set(const std::vector<ObservationWindow>& windows,
                                                    std::uint64_t seed) {
    std::vector<ObservationWindow> augmented;
    augmented.reserve(windows.size() * 2);
    for (const auto& w : windows) {
        augmented.push_back(w);
        augmented.back().flipped = false;
        augmented.push_back(w);
        augmented.back().flipped = true;
    }
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < augmented.size(); ++i)
        (augmented[i].label == Label::Crossing ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty()) throw DataError("balancing needs both classes present");

    auto& major = pos.size() > neg.size() ? pos : neg;
    const std::size_t target = std::min(pos.size(), neg.size());
    Rng rng(seed);
    rng.shuffle(major);
    major.resize(target);

    std::vector<char> keep(augmented.size(), 0);
    for (auto i : pos) keep[i] = 1;
    for (auto i : neg) keep[i] = 1;
    std::vector<ObservationWindow> out;
    out.reserve(2 * target);
    for (std::size_t i = 0; i < augmented.size(); ++i)
        if (keep[i]) out.push_back(std::move(augmented[i]));
    return out;
}

void write_window_list(const std::vector<ObservationWindow>& windows, const std::filesystem::path& path) {
    std::ostringstream os;
    for (const auto& w : windows) {
        ordered_json j;
        j["track_id"] = w.track_id;
        j["frame_indices"] = w.frame_indices;
        j["label"] = to_string(w.label);
        j["tte"] = w.tte;
        j["flipped"] = w.flipped;
        j["split"] = to_string(w.split);
        os << j.dump() << '\n';
    }
    write_text_atomic(path, os.str());
}

std::vector<ObservationWindow> read_window_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open window list " + path.string());
    std::vector<ObservationWindow> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = ordered_json::parse(line);
            ObservationWindow w;
            w.track_id = j.at("track_id").get<std::string>();
            w.frame_indices = j.at("frame_indices").get<std::vector<std::int64_t>>();
            w.label = parse_label(j.at("label").get<std::string>());
            w.tte = j.at("tte").get<std::int64_t>();
            w.flipped = j.at("flipped").get<bool>();
            w.split = parse_split(j.at("split").get<std::string>());
            if (w.frame_indices.empty()) throw DataError("empty frame_indices");
            out.push_back(std::move(w));
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace pedx
