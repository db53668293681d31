#include "pedx/nn/layers.hpp"

#include <cmath>

namespace pedx::nn {

template <class T>
Linear<T>::Linear(std::size_t in, std::size_t out, Rng& rng, bool zero_init)
    : weight(zero_init ? Tensor<T>::parameter({in, out}, std::vector<T>(in * out, T(0)))
                       : init_uniform<T>({in, out}, in, rng)),
      bias(Tensor<T>::parameter({out}, std::vector<T>(out, T(0)))) {}

template <class T>
void Linear<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    out.push_back({prefix + ".weight", weight});
    out.push_back({prefix + ".bias", bias});
}

template <class T>
LayerNorm<T>::LayerNorm(std::size_t dim)
    : gain(Tensor<T>::parameter({dim}, std::vector<T>(dim, T(1)))),
      bias(Tensor<T>::parameter({dim}, std::vector<T>(dim, T(0)))) {}

template <class T>
void LayerNorm<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    out.push_back({prefix + ".gain", gain});
    out.push_back({prefix + ".bias", bias});
}

template <class T>
MultiHeadAttention<T>::MultiHeadAttention(std::size_t dim, std::size_t heads_, Rng& rng)
    : heads(heads_), q(dim, dim, rng), k(dim, dim, rng), v(dim, dim, rng), o(dim, dim, rng) {
    if (heads == 0 || dim % heads != 0)
        throw ShapeError("attention dim " + std::to_string(dim) + " not divisible by heads " + std::to_string(heads));
}

template <class T>
Tensor<T> MultiHeadAttention<T>::operator()(const Tensor<T>& x_q, const Tensor<T>& x_k, const Tensor<T>& x_v,
                                            AttentionWeights* record) const {
    const bool single = x_q.rank() == 2;
    auto lift = [&](const Tensor<T>& t) { return single ? reshape(t, {1, t.dim(0), t.dim(1)}) : t; };
    auto y = scaled_dot_product_attention(q(lift(x_q)), k(lift(x_k)), v(lift(x_v)), heads, record);
    y = o(y);
    return single ? reshape(y, {y.dim(1), y.dim(2)}) : y;
}

template <class T>
void MultiHeadAttention<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    q.collect(prefix + ".q", out);
    k.collect(prefix + ".k", out);
    v.collect(prefix + ".v", out);
    o.collect(prefix + ".o", out);
}

template <class T>
FeedForward<T>::FeedForward(std::size_t dim, std::size_t hidden, Rng& rng) : in(dim, hidden, rng), out(hidden, dim, rng) {}

template <class T>
void FeedForward<T>::collect(const std::string& prefix, ParamList<T>& params) const {
    in.collect(prefix + ".in", params);
    out.collect(prefix + ".out", params);
}

template <class T>
EncoderBlock<T>::EncoderBlock(std::size_t dim, std::size_t heads, std::size_t hidden, Rng& rng)
    : attn(dim, heads, rng), norm1(dim), norm2(dim), ffn(dim, hidden, rng) {}

template <class T>
Tensor<T> EncoderBlock<T>::operator()(const Tensor<T>& x, AttentionWeights* record) const {
    auto h = norm1(add(x, attn(x, record)));
    return norm2(add(h, ffn(h)));
}

template <class T>
void EncoderBlock<T>::collect(const std::string& prefix, ParamList<T>& out) const {
    attn.collect(prefix + ".attn", out);
    norm1.collect(prefix + ".norm1", out);
    ffn.collect(prefix + ".ffn", out);
    norm2.collect(prefix + ".norm2", out);
}

std::vector<double> sinusoidal_table(std::size_t positions, std::size_t dim) {
    std::vector<double> table(positions * dim);
    for (std::size_t p = 0; p < positions; ++p)
        for (std::size_t i = 0; i < dim; ++i) {
            const double freq = std::pow(10000.0, -static_cast<double>(i - i % 2) / static_cast<double>(dim));
            const double angle = static_cast<double>(p) * freq;
            table[p * dim + i] = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    return table;
}

template struct Linear<float>;
template struct Linear<double>;
template struct LayerNorm<float>;
template struct LayerNorm<double>;
template struct MultiHeadAttention<float>;
template struct MultiHeadAttention<double>;
template struct FeedForward<float>;
template struct FeedForward<double>;
template struct EncoderBlock<float>;
template struct EncoderBlock<double>;

}  // namespace pedx::nn
