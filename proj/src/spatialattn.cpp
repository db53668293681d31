#include "pedx/spatialattn.hpp"

#include "pedx/error.hpp"

namespace pedx {

using nn::Tensor;

std::string_view to_string(Stage s) noexcept {
    switch (s) {
        case Stage::Row: return "row";
        case Stage::Column: return "column";
        case Stage::Spatial: return "spatial";
        case Stage::Temporal: return "temporal";
    }
    return "?";
}

Stage parse_stage(std::string_view s) {
    for (Stage st : {Stage::Row, Stage::Column, Stage::Spatial, Stage::Temporal})
        if (to_string(st) == s) return st;
    throw DataError("unknown attention stage '" + std::string(s) + "'");
}

void SeqSpatialConfig::validate() const {
    if (rows == 0 || cols == 0) throw ShapeError("latent image must be at least 1x1");
    if (heads == 0 || dim % heads != 0)
        throw ShapeError("dim " + std::to_string(dim) + " not divisible by heads " + std::to_string(heads));
    if (dim % 2 != 0) throw ShapeError("2-D positional encoding needs an even dim");
}

std::vector<double> positional_table_2d(std::size_t rows, std::size_t cols, std::size_t dim) {
    if (dim % 2 != 0) throw ShapeError("2-D positional encoding needs an even dim, got " + std::to_string(dim));
    const std::size_t half = dim / 2;
    const auto row_pe = nn::sinusoidal_table(rows, half);
    const auto col_pe = nn::sinusoidal_table(cols, half);
    std::vector<double> out(rows * cols * dim);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            double* dst = &out[(r * cols + c) * dim];
            for (std::size_t i = 0; i < half; ++i) {
                dst[i] = row_pe[r * half + i];
                dst[half + i] = col_pe[c * half + i];
            }
        }
    return out;
}

template <class T>
Tensor<T> positional_encode(const Tensor<T>& x) {
    if (x.rank() != 3) throw ShapeError("positional_encode expects (rows, cols, d), got " + nn::to_string(x.shape()));
    const auto table = positional_table_2d(x.dim(0), x.dim(1), x.dim(2));
    return nn::add(x, Tensor<T>::constant(x.shape(), std::vector<T>(table.begin(), table.end())));
}

template <class T>
Tensor<T> row_attention(const nn::MultiHeadAttention<T>& mha, const Tensor<T>& x, nn::AttentionWeights* record) {
    if (x.rank() != 3) throw ShapeError("row_attention expects (rows, cols, d), got " + nn::to_string(x.shape()));
    return mha(x, record);
}

template <class T>
Tensor<T> col_attention(const nn::MultiHeadAttention<T>& mha, const Tensor<T>& x, nn::AttentionWeights* record) {
    if (x.rank() != 3) throw ShapeError("col_attention expects (rows, cols, d), got " + nn::to_string(x.shape()));
    return nn::swap_leading(mha(nn::swap_leading(x), record));
}

template <class T>
SeqSpatialBlock<T>::SeqSpatialBlock(const SeqSpatialConfig& cfg, Rng& rng)
    : row_attn(cfg.dim, cfg.heads, rng),
      col_attn(cfg.dim, cfg.heads, rng),
      norm1(cfg.dim),
      norm2(cfg.dim),
      ffn(cfg.dim, cfg.ffn, rng) {}

template <class T>
Tensor<T> SeqSpatialBlock<T>::operator()(const Tensor<T>& x, AttentionStack* record, std::size_t index) const {
    nn::AttentionWeights wr, wc;
    const auto att = row_attention(row_attn, x, record ? &wr : nullptr);
    const auto att_t = col_attention(col_attn, att, record ? &wc : nullptr);
    if (record) {
        record->add(Stage::Row, index, std::move(wr));
        record->add(Stage::Column, index, std::move(wc));
    }
    const auto h = norm1(nn::add(x, att_t));
    return norm2(nn::add(h, ffn(h)));
}

template <class T>
void SeqSpatialBlock<T>::collect(const std::string& prefix, nn::ParamList<T>& out) const {
    row_attn.collect(prefix + ".row_attn", out);
    col_attn.collect(prefix + ".col_attn", out);
    norm1.collect(prefix + ".norm1", out);
    ffn.collect(prefix + ".ffn", out);
    norm2.collect(prefix + ".norm2", out);
}

template <class T>
SeqSpatialTransformer<T>::SeqSpatialTransformer(const SeqSpatialConfig& c, Rng& rng) : cfg(c), embed(c.in_dim, c.dim, rng) {
    cfg.validate();
    for (std::size_t i = 0; i < cfg.blocks; ++i) blocks.emplace_back(cfg, rng);
}

template <class T>
Tensor<T> SeqSpatialTransformer<T>::operator()(const Tensor<T>& x, AttentionStack* record) const {
    if (x.rank() != 3 || x.dim(0) != cfg.rows || x.dim(1) != cfg.cols || x.dim(2) != cfg.in_dim)
        throw ShapeError("sequential attention expects (" + std::to_string(cfg.rows) + ", " + std::to_string(cfg.cols) +
                         ", " + std::to_string(cfg.in_dim) + "), got " + nn::to_string(x.shape()));
    auto h = embed(x);
    if (cfg.positional) h = positional_encode(h);
    for (std::size_t i = 0; i < blocks.size(); ++i) h = blocks[i](h, record, i);
    return h;
}

template <class T>
void SeqSpatialTransformer<T>::collect(const std::string& prefix, nn::ParamList<T>& out) const {
    embed.collect(prefix + ".embed", out);
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i].collect(prefix + ".block" + std::to_string(i), out);
}

#define PEDX_INSTANTIATE_SPATIAL(T)                                                                              \
    template Tensor<T> positional_encode(const Tensor<T>&);                                                      \
    template Tensor<T> row_attention(const nn::MultiHeadAttention<T>&, const Tensor<T>&, nn::AttentionWeights*); \
    template Tensor<T> col_attention(const nn::MultiHeadAttention<T>&, const Tensor<T>&, nn::AttentionWeights*); \
    template struct SeqSpatialBlock<T>;                                                                          \
    template struct SeqSpatialTransformer<T>;

PEDX_INSTANTIATE_SPATIAL(float)
PEDX_INSTANTIATE_SPATIAL(double)

}  // namespace pedx
