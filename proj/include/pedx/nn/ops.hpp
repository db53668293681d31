#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "pedx/nn/tensor.hpp"

namespace pedx::nn {

// Per-head attention of one attention call: `batch` independent sequences,
// each with a (heads x queries x keys) row-stochastic block.
struct AttentionWeights {
    std::size_t batch = 0;
    std::size_t heads = 0;
    std::size_t queries = 0;
    std::size_t keys = 0;
    std::vector<double> values;  // [batch][heads][queries][keys]

    double at(std::size_t b, std::size_t h, std::size_t q, std::size_t k) const {
        return values[((b * heads + h) * queries + q) * keys + k];
    }
};

// Elementwise.
template <class T> Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);
template <class T> Tensor<T> scale(const Tensor<T>& a, T factor);
template <class T> Tensor<T> relu(const Tensor<T>& x);
template <class T> Tensor<T> sigmoid(const Tensor<T>& x);

// Shape plumbing.
template <class T> Tensor<T> reshape(const Tensor<T>& x, Shape shape);
// (A, B, C) -> (B, A, C).
template <class T> Tensor<T> swap_leading(const Tensor<T>& x);

// y[..., out] = x[..., in] W[in, out] + b[out]. `b` may be undefined.
template <class T> Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b);

// Softmax over the last axis.
template <class T> Tensor<T> softmax(const Tensor<T>& x);

// Normalizes over the last axis, then applies gain[d] and bias[d].
template <class T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, double eps = 1e-5);

// Mean over every axis except the last: (..., C) -> (C).
template <class T> Tensor<T> mean_leading(const Tensor<T>& x);
// (A, B, C) -> (A, C), averaging over B.
template <class T> Tensor<T> mean_middle(const Tensor<T>& x);
// (H, W, C) -> (C)
template <class T> Tensor<T> global_avg_pool(const Tensor<T>& x);
// (t, d) -> (d)
template <class T> Tensor<T> mean_pool_over_sequence(const Tensor<T>& x);
template <class T> Tensor<T> mean_all(const Tensor<T>& x);

// Probabilities are clamped to [1e-7, 1 - 1e-7] before the log.
template <class T> Tensor<T> bce_loss(const Tensor<T>& p, T label);
inline constexpr double kProbClamp = 1e-7;

// Cross-correlation, channels-last.
// x (T, H, W, Cin), w (kt, kh, kw, Cin, Cout), b (Cout) -> (To, Ho, Wo, Cout)
using Triple = std::array<std::size_t, 3>;
template <class T>
Tensor<T> conv3d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, Triple stride, Triple pad);
// x (H, W, Cin), w (kh, kw, Cin, Cout), b (Cout) -> (Ho, Wo, Cout)
template <class T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, std::array<std::size_t, 2> stride,
                 std::array<std::size_t, 2> pad);
std::size_t conv_out_dim(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad);

// Scaled dot-product attention over (B, L, d) tensors, heads split along d,
// scale 1/sqrt(d/heads). Writes the softmax weights to `record` if non-null.
template <class T>
Tensor<T> scaled_dot_product_attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                                       std::size_t heads, AttentionWeights* record);

}  // namespace pedx::nn
