#include "pedx/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "json.hpp"
#include "pedx/error.hpp"

namespace pedx {

double auc_score(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int l : labels) n_pos += l == 1;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("AUC is undefined with a single class");

    // Rank-sum form: average ranks over ties.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * double(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] == 1) rank_sum += avg_rank;
        i = j;
    }
    const double u = rank_sum - double(n_pos) * double(n_pos + 1) / 2.0;
    return u / (double(n_pos) * double(n_neg));
}

Metrics compute_metrics(std::span<const double> scores, std::span<const int> labels, double threshold) {
    if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
    if (scores.empty()) throw DataError("no predictions to score");
    Metrics m;
    m.n = scores.size();
    std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
    for (std::size_t i = 0; i < m.n; ++i) {
        const int p = predict(scores[i], threshold);
        m.positives += labels[i] == 1;
        correct += p == labels[i];
        tp += p == 1 && labels[i] == 1;
        fp += p == 1 && labels[i] == 0;
        fn += p == 0 && labels[i] == 1;
    }
    m.acc = double(correct) / double(m.n);
    if (tp + fp > 0) m.precision = double(tp) / double(tp + fp);
    if (tp + fn > 0) m.recall = double(tp) / double(tp + fn);
    if (2 * tp + fp + fn > 0) m.f1 = 2.0 * double(tp) / double(2 * tp + fp + fn);
    if (m.positives > 0 && m.positives < m.n) m.auc = auc_score(scores, labels);
    return m;
}

namespace {

nlohmann::ordered_json opt(const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nullptr; }

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

std::string metrics_to_json(const Metrics& m) {
    nlohmann::ordered_json j;
    j["n"] = m.n;
    j["positives"] = m.positives;
    j["acc"] = m.acc;
    j["auc"] = opt(m.auc);
    j["f1"] = opt(m.f1);
    j["precision"] = opt(m.precision);
    j["recall"] = opt(m.recall);
    return j.dump();
}

Metrics metrics_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        Metrics m;
        m.n = j.at("n").get<std::size_t>();
        m.positives = j.at("positives").get<std::size_t>();
        m.acc = j.at("acc").get<double>();
        m.auc = opt_from(j, "auc");
        m.f1 = opt_from(j, "f1");
        m.precision = opt_from(j, "precision");
        m.recall = opt_from(j, "recall");
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad metrics record: ") + e.what());
    }
}

bool operator==(const Metrics& a, const Metrics& b) {
    return a.n == b.n && a.positives == b.positives && a.acc == b.acc && a.auc == b.auc && a.f1 == b.f1 &&
           a.precision == b.precision && a.recall == b.recall;
}

void PredictionTable::validate() const {
    if (labels.size() != sample_ids.size()) throw DataError("prediction table: label column length mismatch");
    for (int l : labels)
        if (l != 0 && l != 1) throw DataError("prediction table: labels must be 0 or 1");
    for (const auto& m : models) {
        if (m.scores.size() != sample_ids.size())
            throw DataError("prediction table: column '" + m.name + "' has the wrong length");
        for (double s : m.scores)
            if (!(s >= 0.0 && s <= 1.0)) throw DataError("prediction table: score outside [0, 1] in '" + m.name + "'");
    }
}

std::size_t PredictionTable::model_index(const std::string& name) const {
    for (std::size_t i = 0; i < models.size(); ++i)
        if (models[i].name == name) return i;
    throw DataError("no model named '" + name + "' in prediction table");
}

namespace {

void require_comparable(const PredictionTable& t) {
    t.validate();
    if (t.size() == 0) throw DataError("empty prediction table");
    if (t.models.size() < 2) throw DataError("cross-model analysis needs at least 2 models");
}

}  // namespace

AllWrong all_wrong_analysis(const PredictionTable& t, double threshold) {
    require_comparable(t);
    AllWrong r;
    r.n = t.size();
    for (std::size_t i = 0; i < r.n; ++i) {
        bool all_wrong = true;
        for (std::size_t m = 0; m < t.models.size() && all_wrong; ++m) all_wrong = !t.correct(m, i, threshold);
        if (!all_wrong) continue;
        ++r.count;
        (t.labels[i] == 1 ? r.crossing : r.non_crossing)++;
    }
    r.fraction = double(r.count) / double(r.n);
    if (r.count > 0) {
        r.crossing_share = double(r.crossing) / double(r.count);
        r.non_crossing_share = double(r.non_crossing) / double(r.count);
    }
    return r;
}

std::optional<double> exclusive_correct_ratio(const PredictionTable& t, std::size_t model, double threshold) {
    require_comparable(t);
    if (model >= t.models.size()) throw DataError("model index out of range");
    std::size_t denom = 0, num = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        bool others_wrong = true;
        for (std::size_t m = 0; m < t.models.size() && others_wrong; ++m)
            if (m != model) others_wrong = !t.correct(m, i, threshold);
        if (!others_wrong) continue;
        ++denom;
        num += t.correct(model, i, threshold);
    }
    if (denom == 0) return std::nullopt;
    return double(num) / double(denom);
}

ModeComplement mode_complement(const PredictionTable& dyn, const PredictionTable& stat, const std::string& model,
                               double threshold) {
    dyn.validate();
    stat.validate();
    const std::size_t md = dyn.model_index(model), ms = stat.model_index(model);
    if (dyn.size() != stat.size()) throw DataError("mode tables cover different samples");
    std::map<std::string, std::size_t> stat_at;
    for (std::size_t i = 0; i < stat.size(); ++i) stat_at[stat.sample_ids[i]] = i;
    if (stat_at.size() != stat.size()) throw DataError("duplicate sample id in static table");
    ModeComplement r;
    r.n = dyn.size();
    if (r.n == 0) throw DataError("empty prediction table");
    std::size_t dyn_only = 0, stat_only = 0;
    for (std::size_t i = 0; i < dyn.size(); ++i) {
        const auto it = stat_at.find(dyn.sample_ids[i]);
        if (it == stat_at.end()) throw DataError("sample '" + dyn.sample_ids[i] + "' missing from static table");
        if (dyn.labels[i] != stat.labels[it->second])
            throw DataError("sample '" + dyn.sample_ids[i] + "' has different labels across modes");
        const bool d = dyn.correct(md, i, threshold), s = stat.correct(ms, it->second, threshold);
        dyn_only += d && !s;
        stat_only += s && !d;
    }
    r.dyn_only_correct_pct = 100.0 * double(dyn_only) / double(r.n);
    r.stat_only_correct_pct = 100.0 * double(stat_only) / double(r.n);
    return r;
}

PredictionTable build_table(const std::vector<PredictionSet>& sets) {
    PredictionTable t;
    if (sets.empty()) return t;
    std::vector<std::map<std::string, std::size_t>> index(sets.size());
    for (std::size_t s = 0; s < sets.size(); ++s) {
        const auto& ps = sets[s];
        if (ps.sample_ids.size() != ps.labels.size() || ps.sample_ids.size() != ps.scores.size())
            throw DataError("prediction set '" + ps.model + "' has ragged columns");
        for (std::size_t i = 0; i < ps.sample_ids.size(); ++i)
            if (!index[s].emplace(ps.sample_ids[i], i).second)
                throw DataError("duplicate sample id '" + ps.sample_ids[i] + "' in '" + ps.model + "'");
    }
    std::set<std::string> common;
    for (const auto& [id, _] : index[0]) {
        bool everywhere = true;
        for (std::size_t s = 1; s < sets.size() && everywhere; ++s) everywhere = index[s].count(id) > 0;
        if (everywhere) common.insert(id);
    }
    for (const auto& ps : sets) t.models.push_back({ps.model, ps.mode, {}});
    for (const auto& id : common) {
        const int label = sets[0].labels[index[0].at(id)];
        t.sample_ids.push_back(id);
        t.labels.push_back(label);
        for (std::size_t s = 0; s < sets.size(); ++s) {
            const std::size_t i = index[s].at(id);
            if (sets[s].labels[i] != label) throw DataError("sample '" + id + "' has conflicting labels");
            t.models[s].scores.push_back(sets[s].scores[i]);
        }
    }
    t.validate();
    return t;
}

}  // namespace pedx
