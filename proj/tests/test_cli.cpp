#include <algorithm>
#include <cmath>

#include "cli_util.hpp"
#include "doctest.h"
#include "json.hpp"
#include "pedx/error.hpp"
#include "pedx/image.hpp"
#include "pedx/reports.hpp"
#include "pedx/trainer.hpp"
#include "test_util.hpp"

using namespace pedx;
using nlohmann::json;
using test::run_pedx;

namespace {

const std::vector<std::string> kIds{"a", "b", "c", "d", "e", "f"};
const std::vector<int> kLabels{1, 0, 1, 0, 1, 0};

EvalReport hand_report(const std::string& model, CropMode mode, std::vector<double> scores) {
    EvalReport r;
    r.model = model;
    r.arch = "vivit";
    r.predictions.model = model;
    r.predictions.mode = mode;
    r.predictions.sample_ids = kIds;
    r.predictions.labels = kLabels;
    r.predictions.scores = std::move(scores);
    r.metrics = compute_metrics(r.predictions.scores, r.predictions.labels);
    return r;
}

// Correct-prediction pattern over a..f:
//   A dyn  1 0 0 1 0 0
//   B dyn  0 0 0 1 1 0
//   C dyn  0 0 1 0 0 1
//   A stat 0 1 1 0 1 1
std::vector<EvalReport> hand_reports() {
    return {hand_report("A", CropMode::Dynamic, {0.9, 0.8, 0.2, 0.1, 0.3, 0.6}),
            hand_report("B", CropMode::Dynamic, {0.4, 0.7, 0.3, 0.2, 0.6, 0.7}),
            hand_report("C", CropMode::Dynamic, {0.3, 0.9, 0.8, 0.6, 0.2, 0.4}),
            hand_report("A", CropMode::Static, {0.2, 0.1, 0.9, 0.7, 0.8, 0.4})};
}

void check_hand_compare(const json& j) {
    CHECK(j["kind"] == "pedx-compare");
    REQUIRE(j["by_mode"].size() == 1);
    const auto& d = j["by_mode"][0];
    CHECK(d["mode"] == "dynamic");
    CHECK(d["n"] == 6);
    CHECK(d["all_wrong"]["count"] == 1);
    CHECK(d["all_wrong"]["fraction"].get<double>() == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(d["all_wrong"]["crossing"] == 0);
    CHECK(d["all_wrong"]["non_crossing"] == 1);
    CHECK(d["all_wrong"]["crossing_share"].get<double>() == 0.0);
    CHECK(d["all_wrong"]["non_crossing_share"].get<double>() == 1.0);
    CHECK(d["exclusive_correct"]["A"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d["exclusive_correct"]["B"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d["exclusive_correct"]["C"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    REQUIRE(j["mode_complement"].size() == 1);
    const auto& mc = j["mode_complement"][0];
    CHECK(mc["model"] == "A");
    CHECK(mc["n"] == 6);
    CHECK(mc["dyn_only_correct_pct"].get<double>() == doctest::Approx(100.0 * 2.0 / 6.0).epsilon(1e-12));
    CHECK(mc["stat_only_correct_pct"].get<double>() == doctest::Approx(100.0 * 4.0 / 6.0).epsilon(1e-12));
}

}  // namespace

TEST_CASE("eval report round trip") {
    auto r = hand_report("A", CropMode::Static, {0.9, 0.8, 0.2, 0.1, 0.3, 0.6});
    r.config_json = R"({"seed":3,"mode":"static"})";
    const std::string text = eval_report_json(r);
    const auto back = parse_eval_report(text);
    CHECK(back.model == "A");
    CHECK(back.predictions.mode == CropMode::Static);
    CHECK(back.predictions.sample_ids == r.predictions.sample_ids);
    CHECK(back.predictions.labels == r.predictions.labels);
    CHECK(back.predictions.scores == r.predictions.scores);
    CHECK(back.metrics == r.metrics);
    CHECK(eval_report_json(back) == text);
    CHECK_THROWS_AS(parse_eval_report(R"({"kind":"other"})"), DataError);
    CHECK_THROWS_AS(parse_eval_report("{"), DataError);
}

TEST_CASE("compare on hand-built reports") {
    check_hand_compare(json::parse(compare_report_json(hand_reports())));
}

TEST_CASE("compare errors") {
    const auto reps = hand_reports();
    CHECK_THROWS_AS(compare_report_json({reps[0]}), UsageError);
    CHECK_THROWS_AS(compare_report_json({reps[0], reps[0]}), DataError);
    auto bad = reps[1];
    bad.predictions.labels[0] = 0;
    CHECK_THROWS_AS(compare_report_json({reps[0], bad}), DataError);
}

TEST_CASE("summary over a report directory") {
    test::TempDir dir;
    const auto reps = hand_reports();
    write_text_atomic(dir / "b.json", eval_report_json(reps[1]));
    write_text_atomic(dir / "a.json", eval_report_json(reps[0]));
    write_text_atomic(dir / "cmp.json", compare_report_json(reps));
    write_text_atomic(dir / "notes.txt", "x");
    const auto rows = collect_eval_reports(dir.path());
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].model == "A");
    CHECK(rows[1].model == "B");
    const std::string table = summary_table(rows);
    CHECK(table.find("ACC") != std::string::npos);
    CHECK(table.find("0.333") != std::string::npos);
    const auto j = json::parse(summary_json(rows));
    CHECK(j.size() == 2);
}

TEST_CASE("cli exit codes") {
    auto r = run_pedx({"train", "--arch", "resnet", "--manifest", "m.jsonl", "--out", "x.ckpt"});
    CHECK(r.code == 1);
    CHECK(r.err.find("Usage:") != std::string::npos);
    CHECK(r.err.find("--arch") != std::string::npos);

    CHECK(run_pedx({}).code == 1);
    CHECK(run_pedx({"synth"}).code == 1);
    CHECK(run_pedx({"frobnicate"}).code == 1);
    CHECK(run_pedx({"synth", "--n", "10", "--rho", "2", "--out", "x"}).code == 1);

    r = run_pedx({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("explain") != std::string::npos);

    test::TempDir dir;
    r = run_pedx({"train", "--arch", "vivit", "--manifest", (dir / "missing.jsonl").string(), "--out",
                  (dir / "x.ckpt").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("data error") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "x.ckpt"));

    r = run_pedx({"train", "--arch", "vivit", "--out", (dir / "x.ckpt").string()});
    CHECK(r.code == 1);

    r = run_pedx({"synth", "--n", "5", "--class-ratio", "0.01", "--out", (dir / "s").string()});
    CHECK(r.code == 2);
}

TEST_CASE("cli compare reproduces hand numbers") {
    test::TempDir dir;
    std::vector<std::string> args{"compare", "--reports"};
    const auto reps = hand_reports();
    for (std::size_t i = 0; i < reps.size(); ++i) {
        const auto p = dir / ("r" + std::to_string(i) + ".json");
        write_text_atomic(p, eval_report_json(reps[i]));
        args.push_back(p.string());
    }
    args.push_back("--out");
    args.push_back((dir / "cmp.json").string());
    const auto r = run_pedx(args);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("all models wrong on 1") != std::string::npos);
    const auto j = json::parse(test::slurp(dir / "cmp.json"));
    check_hand_compare(j);
    CHECK(j["config"]["reports"].size() == 4);

    const auto again = run_pedx({"compare", "--reports", args[2], args[2], "--out", (dir / "dup.json").string()});
    CHECK(again.code == 2);
}

TEST_CASE("config file precedence and provenance echo") {
    test::TempDir dir;
    test::CwdGuard cwd(dir.path());
    write_text_atomic("cfg.ini", "seed=9\n[synth]\nn=10\nrho=0.5\n");
    REQUIRE(run_pedx({"--config", "cfg.ini", "--quiet", "synth", "--n", "12", "--out", "ds"}).code == 0);
    const auto j = json::parse(test::slurp("ds/synth.json"));
    CHECK(j["config"]["n"] == 12);
    CHECK(j["config"]["rho"] == 0.5);
    CHECK(j["config"]["seed"] == 9);
    CHECK(j["tracks"] == 12);
    CHECK_FALSE(j["config"].contains("out"));
}

TEST_CASE("pipeline commands are byte-identical on repeat and leave inputs untouched") {
    test::TempDir a, b;
    std::map<std::string, std::string> trees[2];
    int k = 0;
    for (const auto* dir : {&a, &b}) {
        test::CwdGuard cwd(dir->path());
        auto ok = [](std::vector<std::string> args) {
            args.insert(args.begin(), {"--quiet", "--seed", "4"});
            const auto r = run_pedx(args);
            INFO(r.err);
            REQUIRE(r.code == 0);
        };
        ok({"synth", "--n", "16", "--masks", "--out", "ds"});
        const auto dataset = test::tree_bytes("ds");
        ok({"--config", "ds/pipeline.ini", "--workers", "2", "preprocess", "--manifest", "ds/manifest.jsonl", "--mode",
            "static", "--windows-per-track", "1", "--out", "clips"});
        const auto clips = test::tree_bytes("clips");
        const std::vector<std::string> tiny{"--dim", "16", "--heads", "2", "--blocks", "1", "--ffn", "32",
                                            "--epochs", "2"};
        auto train = std::vector<std::string>{"train", "--clips", "clips", "--mode", "static", "--arch", "vivit",
                                              "--out", "v.ckpt"};
        train.insert(train.end(), tiny.begin(), tiny.end());
        ok(train);
        ok({"--config", "ds/pipeline.ini", "train", "--manifest", "ds/manifest.jsonl", "--windows-per-track", "1",
            "--mode", "static", "--arch", "i3d-trans", "--dim", "16", "--heads", "2", "--blocks", "1", "--ffn", "32",
            "--epochs", "1", "--out", "t.ckpt"});
        ok({"eval", "--ckpt", "v.ckpt", "--clips", "clips", "--out", "rv.json"});
        ok({"eval", "--ckpt", "t.ckpt", "--clips", "clips", "--out", "rt.json"});
        ok({"compare", "--reports", "rv.json", "rt.json", "--out", "cmp.json"});
        const auto sample = json::parse(test::slurp("rv.json"))["predictions"][0]["sample_id"].get<std::string>();
        ok({"explain", "--ckpt", "v.ckpt", "--clips", "clips", "--sample", sample, "--out", "ex"});
        ok({"report", "--dir", ".", "--out", "summary.txt"});
        CHECK(test::tree_bytes("ds") == dataset);
        CHECK(test::tree_bytes("clips") == clips);
        trees[k++] = test::tree_bytes(".");
    }
    REQUIRE(trees[0].size() == trees[1].size());
    for (const auto& [name, bytes] : trees[0]) {
        INFO(name);
        CHECK(trees[1].at(name) == bytes);
    }
    CHECK(trees[0].count("ex/overlay.png") == 1);
    CHECK(trees[0].count("v.ckpt.metrics.jsonl") == 1);
}

TEST_CASE("resume continues training from a checkpoint") {
    test::TempDir dir;
    test::CwdGuard cwd(dir.path());
    auto run = [](std::vector<std::string> args) {
        args.insert(args.begin(), {"--quiet"});
        return run_pedx(args).code;
    };
    REQUIRE(run({"synth", "--n", "12", "--out", "ds"}) == 0);
    const std::vector<std::string> base{"--config", "ds/pipeline.ini", "--quiet", "train", "--manifest",
                                        "ds/manifest.jsonl", "--windows-per-track", "1", "--arch", "vivit",
                                        "--dim", "16", "--heads", "2", "--blocks", "1", "--ffn", "32"};
    auto with = [&](std::vector<std::string> extra) {
        auto a = base;
        a.insert(a.end(), extra.begin(), extra.end());
        return run_pedx(a).code;
    };
    REQUIRE(with({"--epochs", "2", "--out", "full.ckpt"}) == 0);
    REQUIRE(with({"--epochs", "1", "--out", "half.ckpt"}) == 0);
    REQUIRE(with({"--epochs", "2", "--resume", "half.ckpt", "--out", "resumed.ckpt"}) == 0);
    // Provenance differs (the resume flag is echoed), so compare the trained state.
    const auto full = load_checkpoint("full.ckpt");
    const auto resumed = load_checkpoint("resumed.ckpt");
    CHECK(resumed.epoch == 2);
    CHECK(resumed.history.size() == 2);
    const auto pf = full.model->parameters();
    const auto pr = resumed.model->parameters();
    REQUIRE(pf.size() == pr.size());
    for (std::size_t i = 0; i < pf.size(); ++i) {
        const auto x = pf[i].tensor.values(), y = pr[i].tensor.values();
        CHECK(std::equal(x.begin(), x.end(), y.begin(), y.end()));
    }
    CHECK(test::slurp("full.ckpt.metrics.jsonl") == test::slurp("resumed.ckpt.metrics.jsonl"));

    CHECK(with({"--arch", "i3d", "--epochs", "2", "--resume", "half.ckpt", "--out", "bad.ckpt"}) == 1);
}
