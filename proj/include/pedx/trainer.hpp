#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pedx/cropper.hpp"
#include "pedx/dataset.hpp"
#include "pedx/evaluator.hpp"
#include "pedx/models.hpp"
#include "pedx/nn/optim.hpp"

namespace pedx {

struct TrainConfig {
    std::size_t batch_size = 8;
    double lr = 1e-4;
    std::size_t epochs = 20;
    std::uint64_t seed = 0;
    CropMode mode = CropMode::Dynamic;
    std::size_t report_every = 0;  // log every n optimizer steps; 0 = per epoch only

    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    std::uint64_t steps = 0;  // optimizer steps so far
    double train_loss = 0.0;  // mean per-sample loss over the epoch
    double train_acc = 0.0;   // during-epoch predictions
    std::optional<Metrics> heldout;
    friend bool operator==(const EpochRecord& a, const EpochRecord& b);
};

// Everything needed to resume training or run inference.
struct Checkpoint {
    ModelConfig model_config;
    TrainConfig train_config;
    std::size_t epoch = 0;  // completed epochs
    std::string rng_state;  // shuffle generator
    std::vector<EpochRecord> history;
    std::shared_ptr<Model<float>> model;
    nn::AdamState<float> adam;
    std::string provenance_json = "{}";  // effective pipeline config, echoed verbatim

    // Fresh model and optimizer for the given configs.
    static Checkpoint init(const ModelConfig& mcfg, const TrainConfig& tcfg);
};

// File layout (little-endian):
//   "PEDXCKPT"  u32 version  u32 header length H  H bytes JSON header
//   payload: for every tensor listed in the header, its values as f32, then
//   the Adam first and second moments for the same tensor
//   u64 FNV-1a hash of the payload, then "PEDXEND!"
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ck);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);
void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);
// Throws UsageError when the checkpoint holds a different architecture.
Checkpoint load_checkpoint(const std::filesystem::path& path, Arch expected);

std::string epoch_to_json(const EpochRecord& r);

struct TrainHooks {
    std::function<void(const EpochRecord&)> on_epoch;
    std::function<void(std::uint64_t step, double mean_loss)> on_report;
};

// Continues `ck` until train_config.epochs epochs are done. Each epoch walks
// a seeded permutation of `train` in batches; per-sample BCE gradients are
// averaged over the batch before one Adam step. Throws RuntimeError naming
// the epoch and batch on a non-finite loss.
void train(Checkpoint& ck, const std::vector<Sample>& train_set, const std::vector<Sample>& heldout,
           const TrainHooks& hooks = {});

// Crossing probabilities, no graph recorded.
std::vector<double> predict_scores(const Model<float>& model, const std::vector<Sample>& samples);

}  // namespace pedx
