#pragma once

#include <string>

#include "pedx/nn/ops.hpp"
#include "pedx/nn/optim.hpp"

namespace pedx::nn {

template <class T>
struct Linear {
    Tensor<T> weight;  // (in, out)
    Tensor<T> bias;    // (out)

    Linear() = default;
    Linear(std::size_t in, std::size_t out, Rng& rng, bool zero_init = false);
    Linear(Tensor<T> w, Tensor<T> b) : weight(std::move(w)), bias(std::move(b)) {}
    Tensor<T> operator()(const Tensor<T>& x) const { return linear(x, weight, bias); }
    void collect(const std::string& prefix, ParamList<T>& out) const;
};

template <class T>
struct LayerNorm {
    Tensor<T> gain;
    Tensor<T> bias;

    LayerNorm() = default;
    explicit LayerNorm(std::size_t dim);
    Tensor<T> operator()(const Tensor<T>& x) const { return layer_norm(x, gain, bias); }
    void collect(const std::string& prefix, ParamList<T>& out) const;
};

// Standard multi-head attention: input projections, scaled dot-product
// attention per head, concatenation, output projection. Operates on (B, L, d)
// or (L, d) inputs; rank-2 inputs are treated as one sequence.
template <class T>
struct MultiHeadAttention {
    std::size_t heads = 1;
    Linear<T> q, k, v, o;

    MultiHeadAttention() = default;
    MultiHeadAttention(std::size_t dim, std::size_t heads, Rng& rng);
    Tensor<T> operator()(const Tensor<T>& x_q, const Tensor<T>& x_k, const Tensor<T>& x_v,
                         AttentionWeights* record = nullptr) const;
    Tensor<T> operator()(const Tensor<T>& x, AttentionWeights* record = nullptr) const {
        return (*this)(x, x, x, record);
    }
    void collect(const std::string& prefix, ParamList<T>& out) const;
};

// Position-wise two-layer feed-forward network with relu.
template <class T>
struct FeedForward {
    Linear<T> in, out;

    FeedForward() = default;
    FeedForward(std::size_t dim, std::size_t hidden, Rng& rng);
    Tensor<T> operator()(const Tensor<T>& x) const { return out(relu(in(x))); }
    void collect(const std::string& prefix, ParamList<T>& out) const;
};

// Post-norm encoder block: LN(x + MHA(x)), then LN(x + FFN(x)).
template <class T>
struct EncoderBlock {
    MultiHeadAttention<T> attn;
    LayerNorm<T> norm1, norm2;
    FeedForward<T> ffn;

    EncoderBlock() = default;
    EncoderBlock(std::size_t dim, std::size_t heads, std::size_t hidden, Rng& rng);
    Tensor<T> operator()(const Tensor<T>& x, AttentionWeights* record = nullptr) const;
    void collect(const std::string& prefix, ParamList<T>& out) const;
};

// Sinusoidal encoding table (positions x dim): sin on even channels, cos on
// odd ones, frequency 10000^(-2i/dim).
std::vector<double> sinusoidal_table(std::size_t positions, std::size_t dim);

}  // namespace pedx::nn
