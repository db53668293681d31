#include <cmath>
#include <numeric>

#include "doctest.h"
#include "pedx/nn/gradcheck.hpp"
#include "pedx/nn/layers.hpp"
#include "pedx/nn/ops.hpp"
#include "pedx/nn/optim.hpp"

using namespace pedx;
using namespace pedx::nn;
using T64 = Tensor<double>;

namespace {

T64 random_tensor(Shape shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Rng rng(seed);
    std::vector<double> v(numel(shape));
    for (auto& x : v) x = rng.uniform(lo, hi);
    return T64::constant(std::move(shape), std::move(v));
}

// Values bounded away from zero so relu kinks never sit inside the FD stencil.
T64 kink_free_tensor(Shape shape, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(numel(shape));
    for (auto& x : v) x = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.1, 1.0);
    return T64::constant(std::move(shape), std::move(v));
}

}  // namespace

TEST_CASE("linear") {
    SUBCASE("identity weight") {
        auto y = linear(T64::constant({2}, {1, 2}), T64::constant({2, 2}, {1, 0, 0, 1}), T64::constant({2}, {0, 0}));
        CHECK(std::vector<double>(y.values().begin(), y.values().end()) == std::vector<double>{1, 2});
    }
    SUBCASE("hand arithmetic") {
        auto y = linear(T64::constant({2}, {1, 0}), T64::constant({2, 2}, {2, 3, 4, 5}), T64::constant({2}, {1, 1}));
        CHECK(std::vector<double>(y.values().begin(), y.values().end()) == std::vector<double>{3, 4});
    }
    SUBCASE("gradient matches central differences") {
        auto res = grad_check([](const std::vector<T64>& in) { return random_projection(linear(in[0], in[1], in[2])); },
                              {random_tensor({3, 4}, 1), random_tensor({4, 2}, 2), random_tensor({2}, 3)});
        CHECK(res.max_rel_error < 1e-6);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(linear(T64::zeros({3}), T64::zeros({4, 2}), T64()), ShapeError);
    }
}

TEST_CASE("multi-head attention") {
    Rng rng(5);
    MultiHeadAttention<double> mha(4, 2, rng);
    SUBCASE("identical tokens attend uniformly") {
        AttentionWeights w;
        mha(T64::constant({2, 4}, {0.3, -1, 2, 0.5, 0.3, -1, 2, 0.5}), &w);
        REQUIRE(w.values.size() == 2 * 2 * 2);
        for (double a : w.values) CHECK(a == 0.5);
    }
    SUBCASE("zero query projection gives uniform rows") {
        auto zq = mha;
        zq.q.weight = T64::parameter({4, 4}, std::vector<double>(16, 0.0));
        AttentionWeights w;
        zq(random_tensor({3, 4}, 9), &w);
        for (double a : w.values) CHECK(a == doctest::Approx(1.0 / 3).epsilon(1e-15));
    }
    SUBCASE("rows are stochastic") {
        AttentionWeights w;
        mha(random_tensor({2, 5, 4}, 10, -3, 3), &w);
        CHECK(w.batch == 2);
        CHECK(w.heads == 2);
        for (std::size_t r = 0; r < w.batch * w.heads * w.queries; ++r) {
            double s = 0;
            for (std::size_t j = 0; j < w.keys; ++j) {
                CHECK(w.values[r * w.keys + j] >= 0.0);
                s += w.values[r * w.keys + j];
            }
            CHECK(std::abs(s - 1.0) < 1e-5);
        }
    }
    SUBCASE("heads must divide the model dim") {
        CHECK_THROWS_AS(MultiHeadAttention<double>(5, 2, rng), ShapeError);
        CHECK_THROWS_AS(scaled_dot_product_attention(T64::zeros({1, 2, 5}), T64::zeros({1, 2, 5}),
                                                     T64::zeros({1, 2, 5}), 2, nullptr),
                        ShapeError);
    }
    SUBCASE("gradient matches central differences") {
        std::vector<T64> inputs{random_tensor({3, 4}, 11)};
        ParamList<double> params;
        mha.collect("mha", params);
        for (auto& p : params) inputs.push_back(cast<double>(p.tensor, false));
        auto res = grad_check(
            [](const std::vector<T64>& in) {
                MultiHeadAttention<double> m;
                m.heads = 2;
                m.q = {in[1], in[2]};
                m.k = {in[3], in[4]};
                m.v = {in[5], in[6]};
                m.o = {in[7], in[8]};
                return random_projection(m(in[0]));
            },
            inputs);
        CHECK(res.max_rel_error < 1e-4);
    }
}

TEST_CASE("layer norm") {
    auto ones = T64::constant({3}, {1, 1, 1});
    auto zeros = T64::constant({3}, {0, 0, 0});
    SUBCASE("constant input") {
        auto y = layer_norm(T64::constant({3}, {1, 1, 1}), ones, zeros);
        for (double v : y.values()) CHECK(v == 0.0);
    }
    SUBCASE("symmetric two-point input") {
        auto y = layer_norm(T64::constant({2}, {1, -1}), T64::constant({2}, {1, 1}), T64::constant({2}, {0, 0}));
        const double f = 1.0 / std::sqrt(1.0 + 1e-5);
        CHECK(y.values()[0] == doctest::Approx(f).epsilon(1e-14));
        CHECK(y.values()[1] == doctest::Approx(-f).epsilon(1e-14));
    }
    SUBCASE("gradient") {
        auto res = grad_check(
            [](const std::vector<T64>& in) { return random_projection(layer_norm(in[0], in[1], in[2])); },
            {random_tensor({2, 5}, 21), random_tensor({5}, 22), random_tensor({5}, 23)});
        CHECK(res.max_rel_error < 1e-4);
    }
}

TEST_CASE("convolution") {
    SUBCASE("output size formula") {
        CHECK(conv_out_dim(64, 3, 2, 1) == 32);
        CHECK(conv_out_dim(8, 3, 2, 1) == 4);
        CHECK(conv_out_dim(5, 5, 1, 0) == 1);
        CHECK_THROWS_AS(conv_out_dim(2, 5, 1, 1), ShapeError);
    }
    SUBCASE("1x1 kernel is a channel mix") {
        auto x = random_tensor({3, 4, 2}, 31);
        auto w = T64::constant({1, 1, 2, 3}, {1, 2, 3, 4, 5, 6});
        auto y = conv2d(x, w, T64(), {1, 1}, {0, 0});
        auto ref = linear(x, T64::constant({2, 3}, {1, 2, 3, 4, 5, 6}), T64());
        REQUIRE(y.shape() == Shape{3, 4, 3});
        for (std::size_t i = 0; i < y.size(); ++i) CHECK(y.values()[i] == doctest::Approx(ref.values()[i]));
    }
    SUBCASE("3x3 box sum of a constant image") {
        auto x = T64::constant({6, 7, 1}, std::vector<double>(42, 2.5));
        auto y = conv2d(x, T64::constant({3, 3, 1, 1}, std::vector<double>(9, 1.0)), T64(), {1, 1}, {0, 0});
        REQUIRE(y.shape() == Shape{4, 5, 1});
        for (double v : y.values()) CHECK(v == doctest::Approx(22.5));
    }
    SUBCASE("conv3d gradient") {
        auto res = grad_check(
            [](const std::vector<T64>& in) { return random_projection(conv3d(in[0], in[1], in[2], {2, 1, 2}, {1, 1, 0})); },
            {random_tensor({4, 5, 5, 2}, 41), random_tensor({3, 3, 2, 2, 3}, 42), random_tensor({3}, 43)});
        CHECK(res.max_rel_error < 1e-4);
    }
    SUBCASE("conv2d gradient") {
        auto res = grad_check(
            [](const std::vector<T64>& in) { return random_projection(conv2d(in[0], in[1], in[2], {2, 2}, {1, 1})); },
            {random_tensor({5, 6, 2}, 44), random_tensor({3, 3, 2, 2}, 45), random_tensor({2}, 46)});
        CHECK(res.max_rel_error < 1e-4);
    }
}

TEST_CASE("pointwise ops, pooling and loss") {
    SUBCASE("softmax of equal logits") {
        auto s = softmax(T64::constant({2}, {0, 0}));
        CHECK(s.values()[0] == 0.5);
        CHECK(s.values()[1] == 0.5);
    }
    SUBCASE("bce at one half is ln 2") {
        CHECK(bce_loss(T64::constant({1}, {0.5}), 1.0).item() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
        CHECK(bce_loss(T64::constant({1}, {0.5}), 0.0).item() == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    }
    SUBCASE("bce is finite on saturated probabilities") {
        CHECK(std::isfinite(bce_loss(T64::constant({1}, {1.0}), 0.0).item()));
        CHECK(std::isfinite(bce_loss(T64::constant({1}, {0.0}), 1.0).item()));
    }
    SUBCASE("gradients") {
        auto x = kink_free_tensor({3, 4}, 51);
        CHECK(grad_check([](const std::vector<T64>& in) { return random_projection(relu(in[0])); }, {x}).max_rel_error <
              1e-4);
        CHECK(grad_check([](const std::vector<T64>& in) { return random_projection(sigmoid(in[0])); }, {x})
                  .max_rel_error < 1e-4);
        CHECK(grad_check([](const std::vector<T64>& in) { return random_projection(softmax(in[0])); }, {x})
                  .max_rel_error < 1e-4);
        CHECK(grad_check([](const std::vector<T64>& in) { return random_projection(swap_leading(in[0])); },
                         {random_tensor({2, 3, 2}, 52)})
                  .max_rel_error < 1e-4);
        CHECK(grad_check([](const std::vector<T64>& in) { return random_projection(global_avg_pool(in[0])); },
                         {random_tensor({2, 3, 4}, 53)})
                  .max_rel_error < 1e-4);
        CHECK(grad_check([](const std::vector<T64>& in) { return random_projection(mean_middle(in[0])); },
                         {random_tensor({2, 3, 4}, 57)})
                  .max_rel_error < 1e-4);
        CHECK(grad_check([](const std::vector<T64>& in) { return random_projection(mean_pool_over_sequence(in[0])); },
                         {random_tensor({5, 3}, 54)})
                  .max_rel_error < 1e-4);
        CHECK(grad_check([](const std::vector<T64>& in) { return bce_loss(sigmoid(in[0]), 1.0); },
                         {random_tensor({1}, 55)})
                  .max_rel_error < 1e-4);
        CHECK(grad_check([](const std::vector<T64>& in) { return bce_loss(in[0], 0.0); },
                         {random_tensor({1}, 56, 0.2, 0.8)})
                  .max_rel_error < 1e-4);
    }
}

TEST_CASE("adam") {
    SUBCASE("first step moves by about lr") {
        ParamList<double> params{{"x", T64::parameter({1}, {0.0})}};
        params[0].tensor.mutable_grad()[0] = 1.0;
        auto state = adam_init(params);
        adam_step(params, state, AdamConfig{});
        CHECK(params[0].tensor.values()[0] == doctest::Approx(-1e-4 / (1.0 + 1e-8)).epsilon(1e-12));
    }
    SUBCASE("zero gradient is a fixed point") {
        ParamList<double> params{{"x", T64::parameter({2}, {1.5, -2.0})}};
        params[0].tensor.mutable_grad();
        auto state = adam_init(params);
        for (int i = 0; i < 5; ++i) adam_step(params, state, AdamConfig{});
        CHECK(params[0].tensor.values()[0] == 1.5);
        CHECK(params[0].tensor.values()[1] == -2.0);
    }
    SUBCASE("minimizes a scalar quadratic") {
        ParamList<double> params{{"x", T64::parameter({1}, {0.0})}};
        auto state = adam_init(params);
        AdamConfig cfg;
        cfg.lr = 0.1;
        for (int i = 0; i < 200; ++i) {
            zero_grads(params);
            auto d = add(params[0].tensor, T64::constant({1}, {-3.0}));
            auto loss = linear(reshape(d, {1, 1}), reshape(d, {1, 1}), T64());  // (x-3)^2
            backward(loss);
            adam_step(params, state, cfg);
        }
        CHECK(std::abs(params[0].tensor.values()[0] - 3.0) < 0.01);
    }
    SUBCASE("non-finite gradient names the parameter") {
        ParamList<double> params{{"encoder.w", T64::parameter({1}, {0.0})}};
        params[0].tensor.mutable_grad()[0] = std::nan("");
        auto state = adam_init(params);
        try {
            adam_step(params, state, AdamConfig{});
            FAIL("expected an error");
        } catch (const RuntimeError& e) {
            CHECK(std::string(e.what()).find("encoder.w") != std::string::npos);
        }
        CHECK(params[0].tensor.values()[0] == 0.0);
    }
}

TEST_CASE("no-grad mode builds no graph") {
    auto p = T64::parameter({2}, {1, 2});
    NoGradGuard guard;
    auto y = relu(p);
    CHECK_FALSE(y.requires_grad());
}
