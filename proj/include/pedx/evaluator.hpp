#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pedx/cropper.hpp"
#include "pedx/trackdata.hpp"

namespace pedx {

inline constexpr double kDefaultThreshold = 0.5;

// Predicted class: crossing iff score >= threshold.
inline int predict(double score, double threshold = kDefaultThreshold) { return score >= threshold ? 1 : 0; }

struct Metrics {
    std::size_t n = 0;
    std::size_t positives = 0;
    double acc = 0.0;
    std::optional<double> auc;  // undefined with a single class
    std::optional<double> f1;   // undefined with no positive labels or predictions
    std::optional<double> precision;
    std::optional<double> recall;
};

// Mann-Whitney AUC, ties count one half. Throws DataError unless both classes
// are present.
double auc_score(std::span<const double> scores, std::span<const int> labels);
Metrics compute_metrics(std::span<const double> scores, std::span<const int> labels,
                        double threshold = kDefaultThreshold);

// {"n","positives","acc","auc","f1","precision","recall"}; undefined values
// are null.
std::string metrics_to_json(const Metrics& m);
Metrics metrics_from_json(const std::string& text);
bool operator==(const Metrics& a, const Metrics& b);

struct ModelColumn {
    std::string name;
    CropMode mode = CropMode::Dynamic;
    std::vector<double> scores;
};

struct PredictionTable {
    std::vector<std::string> sample_ids;
    std::vector<int> labels;
    std::vector<ModelColumn> models;

    std::size_t size() const noexcept { return sample_ids.size(); }
    bool correct(std::size_t model, std::size_t i, double threshold = kDefaultThreshold) const {
        return predict(models[model].scores[i], threshold) == labels[i];
    }
    // Column lengths agree, labels are 0/1, scores lie in [0, 1].
    void validate() const;
    std::size_t model_index(const std::string& name) const;
};

struct AllWrong {
    std::size_t n = 0;
    std::size_t count = 0;
    double fraction = 0.0;
    std::size_t crossing = 0;
    std::size_t non_crossing = 0;
    // Label shares inside the all-wrong subset; undefined when it is empty.
    std::optional<double> crossing_share;
    std::optional<double> non_crossing_share;
};

// Samples misclassified by every model at once. Needs >= 2 models and a
// non-empty table.
AllWrong all_wrong_analysis(const PredictionTable& table, double threshold = kDefaultThreshold);

// Among samples where every model except `model` is wrong, the fraction
// `model` gets right; nullopt when no such sample exists.
std::optional<double> exclusive_correct_ratio(const PredictionTable& table, std::size_t model,
                                              double threshold = kDefaultThreshold);

struct ModeComplement {
    std::size_t n = 0;
    double dyn_only_correct_pct = 0.0;
    double stat_only_correct_pct = 0.0;
};

// Compares one model's dynamic-mode and static-mode predictions over the
// same sample ids (any order). Throws DataError on an id mismatch.
ModeComplement mode_complement(const PredictionTable& dyn, const PredictionTable& stat, const std::string& model,
                               double threshold = kDefaultThreshold);

// One model's predictions in one crop mode, as stored in eval reports.
struct PredictionSet {
    std::string model;
    CropMode mode = CropMode::Dynamic;
    std::vector<std::string> sample_ids;
    std::vector<int> labels;
    std::vector<double> scores;
};

// Aligns sets over their common sample ids (sorted by id). Labels must agree.
PredictionTable build_table(const std::vector<PredictionSet>& sets);

}  // namespace pedx
