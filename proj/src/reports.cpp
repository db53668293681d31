#include "pedx/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"
#include "pedx/error.hpp"
#include "pedx/image.hpp"

namespace pedx {

using nlohmann::ordered_json;

namespace {

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json metrics_obj(const Metrics& m) { return ordered_json::parse(metrics_to_json(m)); }

std::string fmt(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

}  // namespace

std::string eval_report_json(const EvalReport& r) {
    ordered_json j;
    j["kind"] = "pedx-eval";
    j["model"] = r.model;
    j["arch"] = r.arch;
    j["mode"] = to_string(r.predictions.mode);
    j["split"] = r.split;
    j["threshold"] = kDefaultThreshold;
    j["metrics"] = metrics_obj(r.metrics);
    j["predictions"] = ordered_json::array();
    const auto& p = r.predictions;
    for (std::size_t i = 0; i < p.sample_ids.size(); ++i)
        j["predictions"].push_back({{"sample_id", p.sample_ids[i]}, {"label", p.labels[i]}, {"score", p.scores[i]}});
    j["config"] = ordered_json::parse(r.config_json);
    return j.dump(2) + "\n";
}

EvalReport parse_eval_report(const std::string& text) {
    EvalReport r;
    try {
        const auto j = ordered_json::parse(text);
        if (j.at("kind").get<std::string>() != "pedx-eval") throw DataError("not an eval report");
        r.model = j.at("model").get<std::string>();
        r.arch = j.at("arch").get<std::string>();
        r.split = j.at("split").get<std::string>();
        r.metrics = metrics_from_json(j.at("metrics").dump());
        r.predictions.model = r.model;
        r.predictions.mode = parse_crop_mode(j.at("mode").get<std::string>());
        for (const auto& p : j.at("predictions")) {
            r.predictions.sample_ids.push_back(p.at("sample_id").get<std::string>());
            r.predictions.labels.push_back(p.at("label").get<int>());
            r.predictions.scores.push_back(p.at("score").get<double>());
        }
        r.config_json = j.at("config").dump();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad eval report: ") + e.what());
    }
    return r;
}

EvalReport read_eval_report(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return parse_eval_report(std::string(bytes.begin(), bytes.end()));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string compare_report_json(const std::vector<EvalReport>& reports, const std::string& config_json) {
    if (reports.size() < 2) throw UsageError("compare needs at least two eval reports");
    std::set<std::pair<std::string, CropMode>> seen;
    for (const auto& r : reports)
        if (!seen.emplace(r.model, r.predictions.mode).second)
            throw DataError("two reports for model '" + r.model + "' in " + std::string(to_string(r.predictions.mode)) +
                            " mode");

    ordered_json j;
    j["kind"] = "pedx-compare";
    j["threshold"] = kDefaultThreshold;
    j["models"] = ordered_json::array();
    for (const auto& r : reports)
        j["models"].push_back({{"model", r.model}, {"mode", to_string(r.predictions.mode)}, {"metrics", metrics_obj(r.metrics)}});

    j["by_mode"] = ordered_json::array();
    for (CropMode mode : {CropMode::Dynamic, CropMode::Static}) {
        std::vector<PredictionSet> sets;
        for (const auto& r : reports)
            if (r.predictions.mode == mode) sets.push_back(r.predictions);
        if (sets.size() < 2) continue;
        const auto t = build_table(sets);
        if (t.size() == 0) throw DataError("reports share no sample ids");
        const auto aw = all_wrong_analysis(t);
        ordered_json m;
        m["mode"] = to_string(mode);
        m["n"] = t.size();
        m["all_wrong"] = {{"count", aw.count},
                          {"fraction", aw.fraction},
                          {"crossing", aw.crossing},
                          {"non_crossing", aw.non_crossing},
                          {"crossing_share", opt(aw.crossing_share)},
                          {"non_crossing_share", opt(aw.non_crossing_share)}};
        m["exclusive_correct"] = ordered_json::object();
        for (std::size_t k = 0; k < t.models.size(); ++k)
            m["exclusive_correct"][t.models[k].name] = opt(exclusive_correct_ratio(t, k));
        j["by_mode"].push_back(m);
    }

    j["mode_complement"] = ordered_json::array();
    for (const auto& d : reports) {
        if (d.predictions.mode != CropMode::Dynamic) continue;
        for (const auto& s : reports) {
            if (s.predictions.mode != CropMode::Static || s.model != d.model) continue;
            const auto mc = mode_complement(build_table({d.predictions}), build_table({s.predictions}), d.model);
            j["mode_complement"].push_back({{"model", d.model},
                                            {"n", mc.n},
                                            {"dyn_only_correct_pct", mc.dyn_only_correct_pct},
                                            {"stat_only_correct_pct", mc.stat_only_correct_pct}});
        }
    }
    j["config"] = ordered_json::parse(config_json);
    return j.dump(2) + "\n";
}

std::vector<SummaryRow> collect_eval_reports(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<SummaryRow> rows;
    for (const auto& f : files) {
        const auto bytes = read_file(f);
        const auto j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
        if (j.is_discarded() || !j.is_object() || j.value("kind", "") != "pedx-eval") continue;
        const auto r = read_eval_report(f);
        rows.push_back({f.filename().string(), r.model, std::string(to_string(r.predictions.mode)), r.split, r.metrics});
    }
    return rows;
}

std::string summary_table(const std::vector<SummaryRow>& rows) {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-18s %-8s %-6s %6s %6s %6s %6s\n", "model", "mode", "split", "n", "ACC", "AUC", "F1");
    out += buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-18s %-8s %-6s %6zu %6s %6s %6s\n", r.model.c_str(), r.mode.c_str(),
                      r.split.c_str(), r.metrics.n, fmt(r.metrics.acc).c_str(), fmt(r.metrics.auc).c_str(),
                      fmt(r.metrics.f1).c_str());
        out += buf;
    }
    return out;
}

std::string summary_json(const std::vector<SummaryRow>& rows) {
    ordered_json j = ordered_json::array();
    for (const auto& r : rows)
        j.push_back({{"file", r.file}, {"model", r.model}, {"mode", r.mode}, {"split", r.split},
                     {"metrics", metrics_obj(r.metrics)}});
    return j.dump(2) + "\n";
}

}  // namespace pedx
