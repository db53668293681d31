#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pedx/evaluator.hpp"

namespace pedx {

// Eval report: one model in one crop mode on one split, with every
// prediction. JSON with a fixed key order:
//   {"kind":"pedx-eval","model","arch","mode","split","threshold",
//    "metrics":{..},"predictions":[{"sample_id","label","score"}..],
//    "config":{..effective config..}}
struct EvalReport {
    std::string model;  // column name used by compare
    std::string arch;
    std::string split = "test";
    Metrics metrics;
    PredictionSet predictions;
    std::string config_json = "{}";
};

std::string eval_report_json(const EvalReport& r);
EvalReport parse_eval_report(const std::string& text);
EvalReport read_eval_report(const std::filesystem::path& path);

// Compare report over several eval reports, aligned on their common sample
// ids. Per crop mode with at least two models: all-wrong breakdown and
// exclusive-correct ratios. Per model evaluated in both modes: mode
// complement. Undefined ratios are null.
std::string compare_report_json(const std::vector<EvalReport>& reports, const std::string& config_json = "{}");

struct SummaryRow {
    std::string file;
    std::string model;
    std::string mode;
    std::string split;
    Metrics metrics;
};

// Every eval report directly inside `dir`, sorted by file name.
std::vector<SummaryRow> collect_eval_reports(const std::filesystem::path& dir);
std::string summary_table(const std::vector<SummaryRow>& rows);
std::string summary_json(const std::vector<SummaryRow>& rows);

}  // namespace pedx
