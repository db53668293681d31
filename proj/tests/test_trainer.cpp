#include <cmath>

#include "doctest.h"
#include "pedx/error.hpp"
#include "pedx/trainer.hpp"
#include "test_util.hpp"

using namespace pedx;

namespace {

ModelConfig small_model(Arch arch) {
    ModelConfig c;
    c.arch = arch;
    c.input_size = 16;
    c.frames = 4;
    c.dim = 16;
    c.heads = 2;
    c.ffn = 32;
    c.blocks = 1;
    c.conv_channels = {8, 16, 32};
    c.tubelet_frames = 2;
    c.tubelet_size = 8;
    c.seed = 5;
    return c;
}

// Bright clips are crossing, dark ones are not; pixel noise on top.
std::vector<Sample> separable_set(std::size_t n, std::size_t S, std::size_t t, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Sample> out;
    for (std::size_t i = 0; i < n; ++i) {
        auto clip = std::make_shared<CropClip>();
        clip->track_id = "s" + std::to_string(i);
        clip->size = S;
        const int label = int(i % 2);
        for (std::size_t f = 0; f < t; ++f) {
            clip->frame_indices.push_back(std::int64_t(f));
            Image img(S, S, 3);
            for (auto& p : img.pixels) p = std::uint8_t((label ? 150 : 60) + rng.below(50));
            clip->frames.push_back(img);
        }
        out.push_back({clip->track_id, label, i % 4 == 1, clip});
    }
    return out;
}

double accuracy(const Model<float>& m, const std::vector<Sample>& s) {
    const auto scores = predict_scores(m, s);
    std::size_t ok = 0;
    for (std::size_t i = 0; i < s.size(); ++i) ok += predict(scores[i]) == s[i].label;
    return double(ok) / double(s.size());
}

TrainConfig quick(std::size_t epochs, std::uint64_t seed = 1) {
    TrainConfig t;
    t.epochs = epochs;
    t.seed = seed;
    return t;
}

}  // namespace

TEST_CASE("train config validation") {
    TrainConfig t;
    CHECK_NOTHROW(t.validate());
    t.epochs = 0;
    CHECK_THROWS_AS(t.validate(), UsageError);
    t = {};
    t.batch_size = 0;
    CHECK_THROWS_AS(t.validate(), UsageError);
    t = {};
    t.lr = 0;
    CHECK_THROWS_AS(t.validate(), UsageError);
    CHECK_THROWS_AS(Checkpoint::init(small_model(Arch::I3d), quick(0)), UsageError);
}

TEST_CASE("overfit a separable set within 200 steps") {
    const auto data = separable_set(16, 16, 4, 2);
    for (Arch arch : kAllArchs) {
        CAPTURE(to_string(arch));
        auto ck = Checkpoint::init(small_model(arch), quick(100));
        CHECK(accuracy(*ck.model, data) == 0.5);
        std::uint64_t reached = 0;
        TrainHooks hooks;
        hooks.on_epoch = [&](const EpochRecord& r) {
            if (!reached && accuracy(*ck.model, data) == 1.0) reached = r.steps;
        };
        train(ck, data, {}, hooks);
        CHECK(ck.adam.step == 200);
        CHECK(reached > 0);
        CHECK(reached <= 200);
    }
}

TEST_CASE("smoothed loss does not increase after epoch 2") {
    const auto data = separable_set(16, 16, 4, 3);
    for (Arch arch : kAllArchs) {
        CAPTURE(to_string(arch));
        auto cfg = quick(100);
        cfg.report_every = 1;
        auto ck = Checkpoint::init(small_model(arch), cfg);
        std::vector<double> losses;
        TrainHooks hooks;
        hooks.on_report = [&](std::uint64_t, double l) { losses.push_back(l); };
        train(ck, data, {}, hooks);
        REQUIRE(losses.size() == 200);
        // Means of consecutive 10-step blocks, from step 5 on (after epoch 2).
        std::vector<double> smooth;
        for (std::size_t i = 4; i + 10 <= losses.size(); i += 10) {
            double s = 0;
            for (std::size_t k = i; k < i + 10; ++k) s += losses[k];
            smooth.push_back(s / 10);
        }
        for (std::size_t i = 1; i < smooth.size(); ++i) CHECK(smooth[i] <= smooth[i - 1]);
    }
}

TEST_CASE("training is deterministic") {
    const auto data = separable_set(12, 16, 4, 4);
    const auto held = separable_set(6, 16, 4, 5);
    for (Arch arch : kAllArchs) {
        CAPTURE(to_string(arch));
        auto a = Checkpoint::init(small_model(arch), quick(3));
        auto b = Checkpoint::init(small_model(arch), quick(3));
        train(a, data, held);
        train(b, data, held);
        CHECK(a.history == b.history);
        CHECK(encode_checkpoint(a) == encode_checkpoint(b));
        REQUIRE(a.history.size() == 3);
        CHECK(a.history[2].heldout.has_value());
        CHECK(a.history[2].steps == 6);

        auto c = Checkpoint::init(small_model(arch), quick(3, 2));
        train(c, data, held);
        CHECK_FALSE(c.history == a.history);
    }
}

TEST_CASE("resuming matches an uninterrupted run") {
    test::TempDir tmp;
    const auto data = separable_set(10, 16, 4, 6);
    auto full = Checkpoint::init(small_model(Arch::FactorizedVit), quick(4));
    train(full, data, {});
    auto part = Checkpoint::init(small_model(Arch::FactorizedVit), quick(2));
    train(part, data, {});
    save_checkpoint(part, tmp / "part.ckpt");
    auto resumed = load_checkpoint(tmp / "part.ckpt");
    resumed.train_config.epochs = 4;
    train(resumed, data, {});
    CHECK(encode_checkpoint(resumed) == encode_checkpoint(full));
}

TEST_CASE("checkpoint round trip") {
    test::TempDir tmp;
    const auto data = separable_set(8, 16, 4, 7);
    for (Arch arch : kAllArchs) {
        CAPTURE(to_string(arch));
        auto ck = Checkpoint::init(small_model(arch), quick(2));
        train(ck, data, data);
        const auto path = tmp / (std::string(to_string(arch)) + ".ckpt");
        save_checkpoint(ck, path);
        const auto back = load_checkpoint(path, arch);
        CHECK(back.model_config == ck.model_config);
        CHECK(back.train_config == ck.train_config);
        CHECK(back.epoch == 2);
        CHECK(back.history == ck.history);
        CHECK(back.rng_state == ck.rng_state);
        CHECK(back.adam.step == ck.adam.step);
        CHECK(back.adam.m == ck.adam.m);
        CHECK(back.adam.v == ck.adam.v);
        Rng rng(8);
        for (int trial = 0; trial < 3; ++trial) {
            std::vector<float> v(4 * 16 * 16 * 3);
            for (auto& x : v) x = float(rng.uniform(-0.5, 0.5));
            const auto x = nn::Tensor<float>::constant({4, 16, 16, 3}, v);
            CHECK(back.model->forward(x).item() == ck.model->forward(x).item());
        }
        CHECK(encode_checkpoint(back) == read_file(path));
    }
}

TEST_CASE("checkpoint errors") {
    test::TempDir tmp;
    auto ck = Checkpoint::init(small_model(Arch::I3dTrans), quick(1));
    const auto bytes = encode_checkpoint(ck);
    CHECK(std::string(bytes.begin(), bytes.begin() + 8) == "PEDXCKPT");
    CHECK(std::string(bytes.end() - 8, bytes.end()) == "PEDXEND!");

    SUBCASE("truncated") {
        for (std::size_t keep : {std::size_t(4), std::size_t(20), bytes.size() / 2, bytes.size() - 1}) {
            std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + long(keep));
            CHECK_THROWS_AS(decode_checkpoint(cut), DataError);
        }
    }
    SUBCASE("flipped payload byte") {
        auto bad = bytes;
        bad[bad.size() - 40] ^= 0x10;
        CHECK_THROWS_WITH_AS(decode_checkpoint(bad), doctest::Contains("hash"), DataError);
    }
    SUBCASE("version mismatch") {
        auto bad = bytes;
        bad[8] = 9;
        CHECK_THROWS_WITH_AS(decode_checkpoint(bad), doctest::Contains("version 9"), DataError);
    }
    SUBCASE("architecture guard") {
        save_checkpoint(ck, tmp / "a.ckpt");
        CHECK_NOTHROW(load_checkpoint(tmp / "a.ckpt", Arch::I3dTrans));
        CHECK_THROWS_AS(load_checkpoint(tmp / "a.ckpt", Arch::FactorizedVit), UsageError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_checkpoint(tmp / "none.ckpt"), Error); }
}

TEST_CASE("non-finite loss aborts naming the batch") {
    const auto data = separable_set(8, 16, 4, 9);
    auto ck = Checkpoint::init(small_model(Arch::I3d), quick(1));
    for (auto& p : ck.model->parameters())
        if (p.name == "head.bias") p.tensor.mutable_values()[0] = std::nanf("");
    CHECK_THROWS_WITH_AS(train(ck, data, {}), doctest::Contains("batch 0"), RuntimeError);
}

TEST_CASE("epoch record json") {
    EpochRecord r;
    r.epoch = 3;
    r.steps = 12;
    r.train_loss = 0.25;
    r.train_acc = 0.75;
    CHECK(epoch_to_json(r) == R"({"epoch":3,"steps":12,"train_loss":0.25,"train_acc":0.75,"heldout":null})");
}
