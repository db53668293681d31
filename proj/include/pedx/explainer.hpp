#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "pedx/attention.hpp"
#include "pedx/image.hpp"

namespace pedx {

// Dense square matrix, row-major.
struct Matrix {
    std::size_t n = 0;
    std::vector<double> a;

    Matrix() = default;
    explicit Matrix(std::size_t size, double fill = 0.0) : n(size), a(size * size, fill) {}
    static Matrix identity(std::size_t size);
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

Matrix matmul(const Matrix& x, const Matrix& y);

// Mean over heads of sequence `item` of an attention record.
Matrix head_mean(const nn::AttentionWeights& w, std::size_t item);

// 0.5 A + 0.5 I, rows renormalized to sum 1.
Matrix residual_adjust(const Matrix& attention);

// Adjusted layers multiplied latest-first: A~_L ... A~_1. Input layers are raw
// (head-averaged) attention, first layer first.
Matrix rollout(const std::vector<Matrix>& layers);

// Token index of a grid position: (group * rows + row) * cols + col.
// Row/Column layers (one residual around each row+column pair) are composed
// as A_col * A_row before the residual adjustment; Spatial and Temporal layers
// are adjusted one by one. The result covers groups * rows * cols tokens.
Matrix rollout(const AttentionStack& stack);

// Relevance of every token to the mean-pooled output: column means of the
// rollout matrix. Sums to 1.
std::vector<double> token_relevance(const Matrix& rolled);

struct FactorizedRelevance {
    std::vector<std::vector<double>> spatial;  // [group][token], from spatial layers only
    std::vector<double> temporal;              // [group], from temporal layers only
    std::vector<double> combined;              // [group * tokens], product, max 1 per group
};

// Rolls the spatial stages out within each group and the temporal stages out
// across groups (averaged over spatial locations), then multiplies.
FactorizedRelevance factorized_rollout(const AttentionStack& stack);

// Per-frame S x S maps in [0, 1]: token relevance on the rows x cols grid,
// bilinearly upsampled (align-corners=false, clamped edges), min-max
// normalized per frame. A constant frame maps to all ones. Frames in one
// group share a map.
struct Heatmap {
    std::size_t size = 0;
    std::vector<std::vector<double>> frames;  // [frame][y * size + x]
};

// Bilinear upsampling only, no normalization.
std::vector<std::vector<double>> upsample_relevance(const std::vector<double>& relevance, const TokenGrid& grid);
Heatmap relevance_to_heatmap(const std::vector<double>& relevance, const TokenGrid& grid);

// Fixed colormap: dark blue -> blue -> cyan -> yellow -> red over [0, 1].
std::array<std::uint8_t, 3> colormap(double v);

inline constexpr double kOverlayAlpha = 0.6;

// Overlay pixel: (1 - a h) src + a h colormap(h), a = kOverlayAlpha.
Image overlay(const Image& frame, const std::vector<double>& heat);

// One image: frames left to right on top, overlays underneath.
Image overlay_strip(const std::vector<Image>& frames, const Heatmap& heat);
void overlay_export(const std::vector<Image>& frames, const Heatmap& heat, const std::filesystem::path& path);

// Attention dump (little-endian):
//   "PEDXATTN" u32 version u32 layer count
//   u32 x 6 grid (input_size, frames, groups, frames_per_group, rows, cols)
//   per layer: u32 stage (0 row, 1 column, 2 spatial, 3 temporal), u32 block,
//   u32 batch, heads, queries, keys, then batch*heads*queries*keys f32
inline constexpr std::uint32_t kAttentionDumpVersion = 1;
std::vector<std::uint8_t> encode_attention(const AttentionStack& stack);
AttentionStack decode_attention(const std::vector<std::uint8_t>& bytes);

}  // namespace pedx
