#include "pedx/trainer.hpp"

#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "pedx/error.hpp"
#include "pedx/image.hpp"
#include "pedx/log.hpp"
#include "pedx/sampler.hpp"

namespace pedx {

using nlohmann::ordered_json;
using nn::Tensor;

void TrainConfig::validate() const {
    if (batch_size < 1) throw UsageError("batch_size must be >= 1");
    if (epochs < 1) throw UsageError("epochs must be >= 1");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw UsageError("learning rate must be positive and finite");
}

bool operator==(const EpochRecord& a, const EpochRecord& b) {
    return a.epoch == b.epoch && a.steps == b.steps && a.train_loss == b.train_loss && a.train_acc == b.train_acc &&
           a.heldout == b.heldout;
}

namespace {

ordered_json train_config_json(const TrainConfig& c) {
    return {{"batch_size", c.batch_size}, {"lr", c.lr},
            {"epochs", c.epochs},         {"seed", c.seed},
            {"mode", to_string(c.mode)},  {"report_every", c.report_every}};
}

TrainConfig train_config_from(const ordered_json& j) {
    TrainConfig c;
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.lr = j.at("lr").get<double>();
    c.epochs = j.at("epochs").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.mode = parse_crop_mode(j.at("mode").get<std::string>());
    c.report_every = j.at("report_every").get<std::size_t>();
    return c;
}

ordered_json epoch_json(const EpochRecord& r) {
    ordered_json j;
    j["epoch"] = r.epoch;
    j["steps"] = r.steps;
    j["train_loss"] = r.train_loss;
    j["train_acc"] = r.train_acc;
    j["heldout"] = r.heldout ? ordered_json::parse(metrics_to_json(*r.heldout)) : ordered_json(nullptr);
    return j;
}

EpochRecord epoch_from(const ordered_json& j) {
    EpochRecord r;
    r.epoch = j.at("epoch").get<std::size_t>();
    r.steps = j.at("steps").get<std::uint64_t>();
    r.train_loss = j.at("train_loss").get<double>();
    r.train_acc = j.at("train_acc").get<double>();
    if (!j.at("heldout").is_null()) r.heldout = metrics_from_json(j.at("heldout").dump());
    return r;
}

constexpr char kMagic[8] = {'P', 'E', 'D', 'X', 'C', 'K', 'P', 'T'};
constexpr char kEnd[8] = {'P', 'E', 'D', 'X', 'E', 'N', 'D', '!'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}
std::uint64_t get_le(const std::vector<std::uint8_t>& in, std::size_t pos, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t(in[pos + std::size_t(i)]) << (8 * i);
    return v;
}

void put_f32s(std::vector<std::uint8_t>& out, std::span<const float> v) {
    for (float f : v) {
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        put_u32(out, u);
    }
}
void get_f32s(const std::vector<std::uint8_t>& in, std::size_t& pos, std::span<float> v) {
    for (float& f : v) {
        const auto u = std::uint32_t(get_le(in, pos, 4));
        std::memcpy(&f, &u, 4);
        pos += 4;
    }
}

std::uint64_t fnv1a_bytes(const std::uint8_t* p, std::size_t n) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

Rng shuffle_rng(std::uint64_t seed) { return Rng(Rng::derive(seed, 0x73687566)); }

}  // namespace

std::string epoch_to_json(const EpochRecord& r) { return epoch_json(r).dump(); }

Checkpoint Checkpoint::init(const ModelConfig& mcfg, const TrainConfig& tcfg) {
    tcfg.validate();
    Checkpoint ck;
    ck.model_config = mcfg;
    ck.train_config = tcfg;
    ck.model = make_model<float>(mcfg);
    ck.adam = nn::adam_init(ck.model->parameters());
    ck.rng_state = shuffle_rng(tcfg.seed).state();
    return ck;
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck) {
    if (!ck.model) throw RuntimeError("checkpoint has no model");
    const auto params = ck.model->parameters();
    if (ck.adam.m.size() != params.size()) throw RuntimeError("checkpoint optimizer state does not match the model");
    ordered_json h;
    h["format"] = "pedx-checkpoint";
    h["model"] = ordered_json::parse(ck.model_config.to_json());
    h["train"] = train_config_json(ck.train_config);
    h["epoch"] = ck.epoch;
    h["adam_step"] = ck.adam.step;
    h["rng_state"] = ck.rng_state;
    h["history"] = ordered_json::array();
    for (const auto& r : ck.history) h["history"].push_back(epoch_json(r));
    h["provenance"] = ordered_json::parse(ck.provenance_json);
    h["tensors"] = ordered_json::array();
    for (const auto& p : params) h["tensors"].push_back({{"name", p.name}, {"shape", p.tensor.shape()}});
    const std::string header = h.dump();

    std::vector<std::uint8_t> out(kMagic, kMagic + 8);
    put_u32(out, kCheckpointVersion);
    put_u32(out, std::uint32_t(header.size()));
    out.insert(out.end(), header.begin(), header.end());
    const std::size_t payload_start = out.size();
    for (std::size_t i = 0; i < params.size(); ++i) {
        put_f32s(out, params[i].tensor.values());
        put_f32s(out, ck.adam.m[i]);
        put_f32s(out, ck.adam.v[i]);
    }
    put_u64(out, fnv1a_bytes(out.data() + payload_start, out.size() - payload_start));
    out.insert(out.end(), kEnd, kEnd + 8);
    return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) throw DataError("not a checkpoint file");
    const auto version = get_le(bytes, 8, 4);
    if (version != kCheckpointVersion)
        throw DataError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                        std::to_string(kCheckpointVersion) + ")");
    const std::size_t hlen = get_le(bytes, 12, 4);
    if (16 + hlen + 16 > bytes.size()) throw DataError("corrupt checkpoint: truncated header");
    if (std::memcmp(bytes.data() + bytes.size() - 8, kEnd, 8) != 0)
        throw DataError("corrupt checkpoint: missing end marker (truncated?)");
    Checkpoint ck;
    std::vector<std::pair<std::string, nn::Shape>> tensors;
    try {
        const auto h = ordered_json::parse(bytes.begin() + 16, bytes.begin() + 16 + long(hlen));
        ck.model_config = ModelConfig::from_json(h.at("model").dump());
        ck.train_config = train_config_from(h.at("train"));
        ck.epoch = h.at("epoch").get<std::size_t>();
        ck.adam.step = h.at("adam_step").get<std::uint64_t>();
        ck.rng_state = h.at("rng_state").get<std::string>();
        for (const auto& r : h.at("history")) ck.history.push_back(epoch_from(r));
        ck.provenance_json = h.at("provenance").dump();
        for (const auto& t : h.at("tensors"))
            tensors.emplace_back(t.at("name").get<std::string>(), t.at("shape").get<nn::Shape>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("corrupt checkpoint header: ") + e.what());
    }
    const std::size_t payload_start = 16 + hlen;
    const std::size_t payload_end = bytes.size() - 16;
    if (fnv1a_bytes(bytes.data() + payload_start, payload_end - payload_start) != get_le(bytes, payload_end, 8))
        throw DataError("corrupt checkpoint: payload hash mismatch");

    ck.model = make_model<float>(ck.model_config);
    auto params = ck.model->parameters();
    if (params.size() != tensors.size()) throw DataError("checkpoint tensor list does not match the architecture");
    std::size_t total = 0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].name != tensors[i].first || params[i].tensor.shape() != tensors[i].second)
            throw DataError("checkpoint tensor " + tensors[i].first + " does not match the model");
        total += 3 * 4 * params[i].tensor.size();
    }
    if (payload_start + total != payload_end) throw DataError("corrupt checkpoint: payload size mismatch");
    const auto step = ck.adam.step;
    ck.adam = nn::adam_init(params);
    ck.adam.step = step;
    std::size_t pos = payload_start;
    for (std::size_t i = 0; i < params.size(); ++i) {
        get_f32s(bytes, pos, params[i].tensor.mutable_values());
        get_f32s(bytes, pos, ck.adam.m[i]);
        get_f32s(bytes, pos, ck.adam.v[i]);
    }
    return ck;
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
    write_file_atomic(path, encode_checkpoint(ck));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

Checkpoint load_checkpoint(const std::filesystem::path& path, Arch expected) {
    auto ck = load_checkpoint(path);
    if (ck.model_config.arch != expected)
        throw UsageError("checkpoint " + path.string() + " holds a " + std::string(to_string(ck.model_config.arch)) +
                         " model, not " + std::string(to_string(expected)));
    return ck;
}

std::vector<double> predict_scores(const Model<float>& model, const std::vector<Sample>& samples) {
    nn::NoGradGuard guard;
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(model.forward(clip_tensor<float>(*s.clip, s.flipped)).item());
    return out;
}

void train(Checkpoint& ck, const std::vector<Sample>& train_set, const std::vector<Sample>& heldout,
           const TrainHooks& hooks) {
    const auto& cfg = ck.train_config;
    cfg.validate();
    if (!ck.model) throw RuntimeError("checkpoint has no model");
    if (train_set.empty()) throw DataError("training set is empty");
    auto params = ck.model->parameters();
    const nn::AdamConfig adam_cfg{cfg.lr};
    Rng rng;
    rng.set_state(ck.rng_state);

    std::vector<int> heldout_labels;
    for (const auto& s : heldout) heldout_labels.push_back(s.label);

    while (ck.epoch < cfg.epochs) {
        const std::size_t epoch = ck.epoch + 1;
        std::vector<std::size_t> order(train_set.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        rng.shuffle(order);

        double loss_sum = 0.0, report_sum = 0.0;
        std::size_t correct = 0, report_n = 0;
        for (std::size_t start = 0, batch = 0; start < order.size(); start += cfg.batch_size, ++batch) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const float inv = 1.0f / float(end - start);
            nn::zero_grads(params);
            for (std::size_t k = start; k < end; ++k) {
                const auto& s = train_set[order[k]];
                const auto p = ck.model->forward(clip_tensor<float>(*s.clip, s.flipped));
                const auto loss = nn::bce_loss(p, float(s.label));
                const double l = loss.item();
                if (!std::isfinite(l))
                    throw RuntimeError("non-finite loss in epoch " + std::to_string(epoch) + " batch " +
                                       std::to_string(batch) + " (sample " + s.id + ")");
                loss_sum += l;
                report_sum += l;
                ++report_n;
                correct += predict(p.item()) == s.label;
                nn::backward(nn::scale(loss, inv));
            }
            try {
                nn::adam_step(params, ck.adam, adam_cfg);
            } catch (const RuntimeError& e) {
                throw RuntimeError("epoch " + std::to_string(epoch) + " batch " + std::to_string(batch) + ": " +
                                   e.what());
            }
            if (cfg.report_every > 0 && ck.adam.step % cfg.report_every == 0) {
                if (hooks.on_report) hooks.on_report(ck.adam.step, report_sum / double(report_n));
                report_sum = 0.0;
                report_n = 0;
            }
        }
        nn::zero_grads(params);

        EpochRecord rec;
        rec.epoch = epoch;
        rec.steps = ck.adam.step;
        rec.train_loss = loss_sum / double(train_set.size());
        rec.train_acc = double(correct) / double(train_set.size());
        if (!heldout.empty()) rec.heldout = compute_metrics(predict_scores(*ck.model, heldout), heldout_labels);
        ck.history.push_back(rec);
        ck.epoch = epoch;
        ck.rng_state = rng.state();
        if (hooks.on_epoch) hooks.on_epoch(rec);
    }
}

}  // namespace pedx
