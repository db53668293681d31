#pragma once

#include <vector>

#include "pedx/attention.hpp"
#include "pedx/nn/layers.hpp"

namespace pedx {

// Sequential row-then-column attention over a latent image (rows, cols, d).
// Axis 0 indexes image rows, axis 1 columns.
struct SeqSpatialConfig {
    std::size_t rows = 4;
    std::size_t cols = 4;
    std::size_t in_dim = 64;
    std::size_t dim = 64;
    std::size_t heads = 4;
    std::size_t ffn = 128;
    std::size_t blocks = 2;
    bool positional = true;

    void validate() const;
};

// Additive 2-D encoding, (rows * cols * dim) values: channels [0, dim/2)
// carry the 1-D sinusoid of the row index, [dim/2, dim) that of the column.
std::vector<double> positional_table_2d(std::size_t rows, std::size_t cols, std::size_t dim);

template <class T>
nn::Tensor<T> positional_encode(const nn::Tensor<T>& x);

// Self-attention within each row (x is (rows, cols, d)).
template <class T>
nn::Tensor<T> row_attention(const nn::MultiHeadAttention<T>& mha, const nn::Tensor<T>& x,
                            nn::AttentionWeights* record = nullptr);
// Self-attention within each column; result in (rows, cols, d) layout.
template <class T>
nn::Tensor<T> col_attention(const nn::MultiHeadAttention<T>& mha, const nn::Tensor<T>& x,
                            nn::AttentionWeights* record = nullptr);

// x' = LN(x + col(row(x))), out = LN(x' + FFN(x')).
template <class T>
struct SeqSpatialBlock {
    nn::MultiHeadAttention<T> row_attn, col_attn;
    nn::LayerNorm<T> norm1, norm2;
    nn::FeedForward<T> ffn;

    SeqSpatialBlock() = default;
    SeqSpatialBlock(const SeqSpatialConfig& cfg, Rng& rng);
    nn::Tensor<T> operator()(const nn::Tensor<T>& x, AttentionStack* record = nullptr, std::size_t index = 0) const;
    void collect(const std::string& prefix, nn::ParamList<T>& out) const;
};

// Embedding, positional encoding, then `blocks` sequential blocks.
template <class T>
struct SeqSpatialTransformer {
    SeqSpatialConfig cfg;
    nn::Linear<T> embed;
    std::vector<SeqSpatialBlock<T>> blocks;

    SeqSpatialTransformer() = default;
    SeqSpatialTransformer(const SeqSpatialConfig& cfg, Rng& rng);
    nn::Tensor<T> operator()(const nn::Tensor<T>& x, AttentionStack* record = nullptr) const;
    void collect(const std::string& prefix, nn::ParamList<T>& out) const;
};

}  // namespace pedx
