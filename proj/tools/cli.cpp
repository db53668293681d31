#include "cli.hpp"

#include <cstdarg>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "pedx/dataset.hpp"
#include "pedx/error.hpp"
#include "pedx/explainer.hpp"
#include "pedx/log.hpp"
#include "pedx/reports.hpp"
#include "pedx/synthgen.hpp"
#include "pedx/trainer.hpp"

namespace pedx {

namespace {

using nlohmann::ordered_json;

const std::vector<std::string> kArchNames{"i3d", "i3d-trans", "inception-trans", "vivit"};
const std::vector<std::string> kModeNames{"static", "dynamic"};

// Options whose effective values are echoed into output artifacts.
class Echo {
public:
    template <class T>
    CLI::Option* option(CLI::App* app, const std::string& name, T& var, const std::string& desc) {
        items_.emplace_back(name, [&var] { return ordered_json(var); });
        return app->add_option("--" + name, var, desc);
    }
    CLI::Option* flag(CLI::App* app, const std::string& name, bool& var, const std::string& desc) {
        items_.emplace_back(name, [&var] { return ordered_json(var); });
        return app->add_flag("--" + name, var, desc);
    }
    void into(ordered_json& j) const {
        for (const auto& [name, get] : items_) j[name] = get();
    }

private:
    std::vector<std::pair<std::string, std::function<ordered_json()>>> items_;
};

struct Global {
    std::uint64_t seed = 0;
    bool json = false;
    bool quiet = false;
    std::size_t workers = 1;
    Echo echo;
};

struct DataOpts {
    std::string manifest;
    std::string clips;
    std::size_t static_size = 600;
    double margin = 0.05;
    std::size_t input_size = 64;
    int obs_len = 16;
    int stride = 2;
    int tte_min = 30;
    int tte_max = 60;
    std::size_t windows_per_track = 0;
    double train_ratio = 0.7;
};

void add_crop_sampling(CLI::App* app, Echo& echo, DataOpts& d) {
    echo.option(app, "static-size", d.static_size, "Static crop side in source pixels")->check(CLI::PositiveNumber);
    echo.option(app, "margin", d.margin, "Dynamic crop margin per side, fraction of bbox height")
        ->check(CLI::Range(0.0, 10.0));
    echo.option(app, "input-size", d.input_size, "Model input side S")->check(CLI::PositiveNumber);
    echo.option(app, "obs-len", d.obs_len, "Observation length in frames")->check(CLI::PositiveNumber);
    echo.option(app, "stride", d.stride, "Frame stride inside the observation")->check(CLI::PositiveNumber);
    echo.option(app, "tte-min", d.tte_min, "Minimum time to event in frames")->check(CLI::NonNegativeNumber);
    echo.option(app, "tte-max", d.tte_max, "Maximum time to event in frames")->check(CLI::NonNegativeNumber);
    echo.option(app, "windows-per-track", d.windows_per_track, "Windows kept per track (0 = all)");
    echo.option(app, "train-ratio", d.train_ratio, "Track fraction for training when the manifest has no split")
        ->check(CLI::Range(0.0, 1.0));
}

void add_data_source(CLI::App* app, Echo& echo, DataOpts& d) {
    auto* m = echo.option(app, "manifest", d.manifest, "Manifest (clips are cropped on the fly)");
    auto* c = echo.option(app, "clips", d.clips, "Clip store written by preprocess");
    m->excludes(c);
    add_crop_sampling(app, echo, d);
}

SamplingConfig sampling_config(const DataOpts& d, std::uint64_t seed) {
    SamplingConfig s;
    s.obs_len_frames = d.obs_len;
    s.stride = d.stride;
    s.tte_min = d.tte_min;
    s.tte_max = d.tte_max;
    s.seed = seed;
    s.windows_per_track = d.windows_per_track;
    s.validate();
    return s;
}

CropConfig crop_config(const DataOpts& d, CropMode mode) {
    CropConfig c;
    c.mode = mode;
    c.static_width = c.static_height = d.static_size;
    c.dynamic_margin_fraction = d.margin;
    c.model_input_size = d.input_size;
    c.validate();
    return c;
}

struct DataSource {
    std::vector<ObservationWindow> windows;
    ClipLookup lookup;
    std::size_t input_size = 0;

    std::vector<ObservationWindow> split(SplitTag tag) const {
        std::vector<ObservationWindow> out;
        for (const auto& w : windows)
            if (w.split == tag) out.push_back(w);
        return out;
    }
};

DataSource open_data(const DataOpts& d, CropMode mode, std::uint64_t seed) {
    DataSource src;
    if (!d.clips.empty()) {
        auto store = std::make_shared<ClipStore>(ClipStore::open(d.clips));
        if (store->mode != mode)
            throw DataError("clip store " + d.clips + " holds " + std::string(to_string(store->mode)) +
                            " crops, expected " + std::string(to_string(mode)));
        src.windows = store->windows;
        src.input_size = store->input_size;
        src.lookup = [store](const ObservationWindow& w) { return store->load(w); };
    } else if (!d.manifest.empty()) {
        auto m = std::make_shared<Manifest>(load_manifest(d.manifest));
        const auto ccfg = crop_config(d, mode);
        src.windows = split_windows(*m, sampling_config(d, seed), d.train_ratio);
        src.input_size = ccfg.model_input_size;
        const auto frames = disk_frames(*m);
        src.lookup = [m, ccfg, frames](const ObservationWindow& w) {
            return std::make_shared<const CropClip>(make_clip(m->track(w.track_id), w, ccfg, frames));
        };
    } else {
        throw UsageError("one of --manifest or --clips is required");
    }
    return src;
}

void say(const char* fmt, ...) {
    va_list ap, ap2;
    va_start(ap, fmt);
    va_copy(ap2, ap);
    std::string buf(std::size_t(std::vsnprintf(nullptr, 0, fmt, ap)), '\0');
    va_end(ap);
    std::vsnprintf(buf.data(), buf.size() + 1, fmt, ap2);
    va_end(ap2);
    std::cout << buf;
}

std::string acc_text(const std::optional<Metrics>& m) {
    if (!m) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", m->acc);
    return buf;
}

void print_json(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

// Output files may name directories that do not exist yet.
void make_parent(const std::string& file) {
    const auto parent = std::filesystem::path(file).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

ordered_json parse_or_empty(const std::string& text) {
    return text.empty() ? ordered_json::object() : ordered_json::parse(text);
}

// ---- synth -------------------------------------------------------------

struct SynthOpts {
    std::size_t n = 256;
    double rho = 1.0;
    double class_ratio = 0.5;
    std::size_t image_size = 64;
    std::size_t frames = 61;
    double noise = 0.0;
    bool masks = false;
    std::string out;
};

void run_synth(const Global& g, const Echo& echo, const SynthOpts& o) {
    SynthConfig cfg;
    cfg.n = o.n;
    cfg.rho = o.rho;
    cfg.class_ratio = o.class_ratio;
    cfg.seed = g.seed;
    cfg.image_size = o.image_size;
    cfg.frames = o.frames;
    cfg.noise = o.noise;
    cfg.validate();
    const auto m = write_dataset(cfg, o.out, o.masks);
    std::size_t crossing = 0;
    for (const auto& t : m.tracks) crossing += t.label == Label::Crossing;

    ordered_json j;
    j["kind"] = "pedx-synth";
    j["tracks"] = m.tracks.size();
    j["crossing"] = crossing;
    j["static_crop_size"] = synth_static_crop_size(o.image_size);
    j["config"] = ordered_json::object();
    echo.into(j["config"]);
    write_text_atomic(std::filesystem::path(o.out) / "synth.json", j.dump(2) + "\n");

    const std::string s = std::to_string(synth_static_crop_size(o.image_size));
    std::string ini = "# Crop settings matched to this dataset's frame size; pass with --config.\n";
    for (const char* sec : {"preprocess", "train", "eval", "explain"}) ini += std::string("[") + sec + "]\nstatic-size=" + s + "\n";
    write_text_atomic(std::filesystem::path(o.out) / "pipeline.ini", ini);

    if (g.json) print_json(j);
    else say("wrote %zu tracks (%zu crossing) to %s\n", m.tracks.size(), crossing, o.out.c_str());
}

// ---- preprocess --------------------------------------------------------

struct PreOpts {
    DataOpts data;
    std::string mode = "dynamic";
    std::string out;
};

void run_preprocess(const Global& g, const Echo& echo, const PreOpts& o) {
    if (o.data.manifest.empty()) throw UsageError("preprocess needs --manifest");
    const auto m = load_manifest(o.data.manifest);
    ordered_json cfg = ordered_json::object();
    echo.into(cfg);
    const auto store = write_clip_store(m, sampling_config(o.data, g.seed), crop_config(o.data, parse_crop_mode(o.mode)),
                                        o.out, g.workers, cfg.dump());
    std::size_t train = 0, test = 0;
    for (const auto& w : store.windows) (w.split == SplitTag::Train ? train : test)++;
    if (g.json) {
        print_json({{"kind", "pedx-preprocess"}, {"windows", store.windows.size()}, {"train", train}, {"test", test}});
    } else {
        say("wrote %zu %s clips (%zu train, %zu test) to %s\n", store.windows.size(), o.mode.c_str(), train,
                    test, o.out.c_str());
    }
}

// ---- train -------------------------------------------------------------

struct TrainOpts {
    DataOpts data;
    std::string arch;
    std::string mode = "dynamic";
    std::string out;
    std::string resume;
    std::size_t epochs = 20;
    std::size_t batch_size = 8;
    double lr = 1e-4;
    std::size_t report_every = 0;
    std::size_t dim = 64;
    std::size_t heads = 4;
    std::size_t blocks = 2;
    std::size_t ffn = 128;
};

void run_train(const Global& g, const Echo& echo, const TrainOpts& o) {
    const CropMode mode = parse_crop_mode(o.mode);
    const DataSource src = open_data(o.data, mode, g.seed);
    const auto train_windows = balance_training_set(src.split(SplitTag::Train), g.seed);
    const auto train_set = make_samples(train_windows, src.lookup);
    const auto heldout = make_samples(src.split(SplitTag::Test), src.lookup);
    log_info("training on " + std::to_string(train_set.size()) + " samples, " + std::to_string(heldout.size()) +
             " held out");

    TrainConfig tc;
    tc.batch_size = o.batch_size;
    tc.lr = o.lr;
    tc.epochs = o.epochs;
    tc.seed = g.seed;
    tc.mode = mode;
    tc.report_every = o.report_every;

    Checkpoint ck;
    if (!o.resume.empty()) {
        ck = load_checkpoint(o.resume, parse_arch(o.arch));
        if (ck.train_config.mode != mode) throw UsageError("--resume checkpoint was trained on another crop mode");
        ck.train_config.epochs = o.epochs;
    } else {
        ModelConfig mc;
        mc.arch = parse_arch(o.arch);
        mc.input_size = src.input_size;
        mc.dim = o.dim;
        mc.heads = o.heads;
        mc.blocks = o.blocks;
        mc.ffn = o.ffn;
        mc.seed = g.seed;
        mc.validate();
        ck = Checkpoint::init(mc, tc);
    }
    ordered_json prov = ordered_json::object();
    echo.into(prov);
    ck.provenance_json = prov.dump();

    std::string log_lines;
    for (const auto& r : ck.history) log_lines += epoch_to_json(r) + "\n";
    TrainHooks hooks;
    hooks.on_epoch = [&](const EpochRecord& r) {
        log_lines += epoch_to_json(r) + "\n";
        char buf[160];
        std::snprintf(buf, sizeof buf, "epoch %zu  loss %.4f  train acc %.3f  held-out acc %s", r.epoch, r.train_loss,
                      r.train_acc, acc_text(r.heldout).c_str());
        log_info(buf);
    };
    hooks.on_report = [](std::uint64_t step, double loss) {
        log_info("step " + std::to_string(step) + "  loss " + std::to_string(loss));
    };
    train(ck, train_set, heldout, hooks);
    make_parent(o.out);
    save_checkpoint(ck, o.out);
    write_text_atomic(o.out + ".metrics.jsonl", log_lines);

    const auto& last = ck.history.back();
    if (g.json) {
        print_json(ordered_json::parse(epoch_to_json(last)));
    } else {
        say("saved %s after %zu epochs; held-out acc %s\n", o.out.c_str(), ck.epoch,
                    acc_text(last.heldout).c_str());
    }
}

// ---- eval --------------------------------------------------------------

struct EvalOpts {
    DataOpts data;
    std::string ckpt;
    std::string split = "test";
    std::string name;
    std::string out;
};

void run_eval(const Global& g, const Echo& echo, const EvalOpts& o) {
    const auto ck = load_checkpoint(o.ckpt);
    const CropMode mode = ck.train_config.mode;
    const DataSource src = open_data(o.data, mode, g.seed);
    if (src.input_size != ck.model_config.input_size) throw DataError("clip size does not match the checkpoint input size");
    const auto samples = make_samples(src.split(parse_split(o.split)), src.lookup);
    if (samples.empty()) throw DataError("no windows in the " + o.split + " split");

    EvalReport r;
    r.arch = std::string(to_string(ck.model_config.arch));
    r.model = o.name.empty() ? r.arch : o.name;
    r.split = o.split;
    r.predictions.model = r.model;
    r.predictions.mode = mode;
    r.predictions.scores = predict_scores(*ck.model, samples);
    for (const auto& s : samples) {
        r.predictions.sample_ids.push_back(s.id);
        r.predictions.labels.push_back(s.label);
    }
    r.metrics = compute_metrics(r.predictions.scores, r.predictions.labels);
    ordered_json cfg = ordered_json::object();
    echo.into(cfg);
    cfg["model_config"] = ordered_json::parse(ck.model_config.to_json());
    cfg["train_provenance"] = parse_or_empty(ck.provenance_json);
    r.config_json = cfg.dump();
    make_parent(o.out);
    write_text_atomic(o.out, eval_report_json(r));

    if (g.json) print_json(ordered_json::parse(metrics_to_json(r.metrics)));
    else std::cout << summary_table({{o.out, r.model, std::string(to_string(mode)), r.split, r.metrics}});
}

// ---- compare -----------------------------------------------------------

struct CompareOpts {
    std::vector<std::string> reports;
    std::string out;
};

void run_compare(const Global& g, const Echo& echo, const CompareOpts& o) {
    std::vector<EvalReport> reports;
    for (const auto& p : o.reports) reports.push_back(read_eval_report(p));
    ordered_json cfg = ordered_json::object();
    echo.into(cfg);
    const std::string text = compare_report_json(reports, cfg.dump());
    make_parent(o.out);
    write_text_atomic(o.out, text);
    if (g.json) {
        std::cout << text;
        return;
    }
    const auto j = ordered_json::parse(text);
    for (const auto& m : j["by_mode"]) {
        say("%s mode, %zu common samples: all models wrong on %zu (%.1f%%), %zu of them non-crossing\n",
                    m["mode"].get<std::string>().c_str(), m["n"].get<std::size_t>(),
                    m["all_wrong"]["count"].get<std::size_t>(), 100.0 * m["all_wrong"]["fraction"].get<double>(),
                    m["all_wrong"]["non_crossing"].get<std::size_t>());
        for (const auto& [name, v] : m["exclusive_correct"].items()) {
            if (v.is_null()) say("  %-18s right when all others wrong: undefined\n", name.c_str());
            else say("  %-18s right when all others wrong: %.1f%%\n", name.c_str(), 100.0 * v.get<double>());
        }
    }
    for (const auto& c : j["mode_complement"])
        say("%-18s dynamic-only correct %.1f%%, static-only correct %.1f%%\n",
                    c["model"].get<std::string>().c_str(), c["dyn_only_correct_pct"].get<double>(),
                    c["stat_only_correct_pct"].get<double>());
}

// ---- explain -----------------------------------------------------------

struct ExplainOpts {
    DataOpts data;
    std::string ckpt;
    std::string sample;
    bool flip = false;
    std::string out;
};

void run_explain(const Global& g, const Echo& echo, const ExplainOpts& o) {
    const auto ck = load_checkpoint(o.ckpt);
    const DataSource src = open_data(o.data, ck.train_config.mode, g.seed);
    const ObservationWindow* win = nullptr;
    for (const auto& w : src.windows)
        if (w.sample_id() == o.sample) win = &w;
    if (!win) throw DataError("no observation window with sample id " + o.sample);
    const auto clip = src.lookup(*win);
    if (clip->size != ck.model_config.input_size) throw DataError("clip size does not match the checkpoint input size");

    AttentionStack rec;
    double score;
    {
        nn::NoGradGuard guard;
        score = ck.model->forward(clip_tensor<float>(*clip, o.flip), &rec).item();
    }
    if (rec.layers.empty())
        throw UsageError(std::string(to_string(ck.model_config.arch)) + " records no attention; nothing to explain");

    ordered_json j;
    j["kind"] = "pedx-explain";
    j["sample_id"] = o.sample;
    j["label"] = win->label == Label::Crossing ? 1 : 0;
    j["score"] = score;
    j["arch"] = to_string(ck.model_config.arch);
    j["mode"] = to_string(ck.train_config.mode);
    j["grid"] = {{"input_size", rec.grid.input_size}, {"frames", rec.grid.frames},
                 {"groups", rec.grid.groups},         {"frames_per_group", rec.grid.frames_per_group},
                 {"rows", rec.grid.rows},             {"cols", rec.grid.cols}};
    std::vector<double> relevance;
    if (ck.model_config.arch == Arch::FactorizedVit) {
        const auto f = factorized_rollout(rec);
        relevance = f.combined;
        j["method"] = "factorized";
        j["temporal_relevance"] = f.temporal;
    } else {
        relevance = token_relevance(rollout(rec));
        j["method"] = "rollout";
    }
    j["token_relevance"] = relevance;
    ordered_json cfg = ordered_json::object();
    echo.into(cfg);
    j["config"] = cfg;

    std::vector<Image> frames = clip->frames;
    if (o.flip)
        for (auto& f : frames) f = flip_horizontal(f);
    const std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    overlay_export(frames, relevance_to_heatmap(relevance, rec.grid), dir / "overlay.png");
    write_file_atomic(dir / "attention.bin", encode_attention(rec));
    write_text_atomic(dir / "explain.json", j.dump(2) + "\n");

    if (g.json) print_json(j);
    else say("sample %s  label %d  score %.4f  -> %s\n", o.sample.c_str(), int(j["label"]), score, o.out.c_str());
}

// ---- report ------------------------------------------------------------

struct ReportOpts {
    std::string dir;
    std::string out;
};

void run_report(const Global& g, const ReportOpts& o) {
    const auto rows = collect_eval_reports(o.dir);
    if (rows.empty()) throw DataError("no eval reports in " + o.dir);
    const std::string text = g.json ? summary_json(rows) : summary_table(rows);
    if (!o.out.empty()) {
        make_parent(o.out);
        write_text_atomic(o.out, text);
    }
    std::cout << text;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"pedx: pedestrian crossing-action anticipation on video clips"};
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "INI/TOML file with option values (command-line flags take precedence)");
    app.require_subcommand(1);
    app.fallthrough();

    Global g;
    g.echo.option(&app, "seed", g.seed, "Seed for every random choice");
    app.add_flag("--json", g.json, "Machine-readable output on stdout");
    app.add_flag("--quiet", g.quiet, "Only warnings on stderr");
    app.add_option("--workers", g.workers, "Worker threads for cropping")->check(CLI::PositiveNumber);

    std::map<const CLI::App*, Echo> echo;
    auto sub = [&](const char* name, const char* desc) {
        auto* s = app.add_subcommand(name, desc);
        echo[s] = g.echo;
        return s;
    };

    SynthOpts so;
    auto* synth = sub("synth", "Write a synthetic dataset (frames, masks, manifest)");
    {
        auto& e = echo[synth];
        e.option(synth, "n", so.n, "Number of tracks")->check(CLI::Range(std::size_t(4), std::size_t(1) << 20));
        e.option(synth, "rho", so.rho, "P(crosswalk marker present == crossing label)")->check(CLI::Range(0.0, 1.0));
        e.option(synth, "class-ratio", so.class_ratio, "Fraction of crossing tracks")->check(CLI::Range(0.0, 1.0));
        e.option(synth, "image-size", so.image_size, "Frame side in pixels")->check(CLI::Range(32, 224));
        e.option(synth, "frames", so.frames, "Frames per track")->check(CLI::PositiveNumber);
        e.option(synth, "noise", so.noise, "Per-pixel noise amplitude")->check(CLI::NonNegativeNumber);
        e.flag(synth, "masks", so.masks, "Also write ground-truth mask images");
        synth->add_option("--out", so.out, "Output directory")->required();
    }

    PreOpts po;
    auto* pre = sub("preprocess", "Crop observation windows into a clip store");
    {
        auto& e = echo[pre];
        e.option(pre, "manifest", po.data.manifest, "Manifest file")->required();
        e.option(pre, "mode", po.mode, "Crop mode")->check(CLI::IsMember(kModeNames));
        add_crop_sampling(pre, e, po.data);
        pre->add_option("--out", po.out, "Output directory")->required();
    }

    TrainOpts to;
    auto* tr = sub("train", "Train a model and write a checkpoint");
    {
        auto& e = echo[tr];
        add_data_source(tr, e, to.data);
        e.option(tr, "arch", to.arch, "Architecture")->required()->check(CLI::IsMember(kArchNames));
        e.option(tr, "mode", to.mode, "Crop mode")->check(CLI::IsMember(kModeNames));
        e.option(tr, "epochs", to.epochs, "Total epochs")->check(CLI::PositiveNumber);
        e.option(tr, "batch-size", to.batch_size, "Batch size")->check(CLI::PositiveNumber);
        e.option(tr, "lr", to.lr, "Adam learning rate (constant)")->check(CLI::PositiveNumber);
        e.option(tr, "report-every", to.report_every, "Log the running loss every n steps (0 = off)");
        e.option(tr, "dim", to.dim, "Token / latent width")->check(CLI::PositiveNumber);
        e.option(tr, "heads", to.heads, "Attention heads")->check(CLI::PositiveNumber);
        e.option(tr, "blocks", to.blocks, "Transformer blocks")->check(CLI::PositiveNumber);
        e.option(tr, "ffn", to.ffn, "Feed-forward width")->check(CLI::PositiveNumber);
        e.option(tr, "resume", to.resume, "Continue from this checkpoint");
        tr->add_option("--out", to.out, "Checkpoint path")->required();
    }

    EvalOpts eo;
    auto* ev = sub("eval", "Score a split and write an eval report");
    {
        auto& e = echo[ev];
        e.option(ev, "ckpt", eo.ckpt, "Checkpoint")->required();
        add_data_source(ev, e, eo.data);
        e.option(ev, "split", eo.split, "Split to score")->check(CLI::IsMember({"train", "test"}));
        e.option(ev, "name", eo.name, "Model name in reports (default: the architecture)");
        ev->add_option("--out", eo.out, "Report path")->required();
    }

    CompareOpts co;
    auto* cmp = sub("compare", "Cross-model analyses over eval reports");
    {
        auto& e = echo[cmp];
        e.option(cmp, "reports", co.reports, "Eval reports")->required()->expected(2, 1 << 16);
        cmp->add_option("--out", co.out, "Report path")->required();
    }

    ExplainOpts xo;
    auto* ex = sub("explain", "Attention rollout heatmaps for one sample");
    {
        auto& e = echo[ex];
        e.option(ex, "ckpt", xo.ckpt, "Checkpoint")->required();
        add_data_source(ex, e, xo.data);
        e.option(ex, "sample", xo.sample, "Sample id <track>@<last frame>")->required();
        e.flag(ex, "flip", xo.flip, "Explain the mirrored clip");
        ex->add_option("--out", xo.out, "Output directory")->required();
    }

    ReportOpts ro;
    auto* rep = sub("report", "Metrics table over the eval reports in a directory");
    rep->add_option("--dir", ro.dir, "Directory with eval reports")->required();
    rep->add_option("--out", ro.out, "Also write the table here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) return 0;
        const auto subs = app.get_subcommands();
        std::cerr << (subs.empty() ? app.help() : subs.front()->help());
        return 1;
    }
    set_log_level(g.quiet ? LogLevel::Warn : LogLevel::Info);

    try {
        if (synth->parsed()) run_synth(g, echo[synth], so);
        else if (pre->parsed()) run_preprocess(g, echo[pre], po);
        else if (tr->parsed()) run_train(g, echo[tr], to);
        else if (ev->parsed()) run_eval(g, echo[ev], eo);
        else if (cmp->parsed()) run_compare(g, echo[cmp], co);
        else if (ex->parsed()) run_explain(g, echo[ex], xo);
        else if (rep->parsed()) run_report(g, ro);
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace pedx
