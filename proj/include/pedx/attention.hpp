#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "pedx/nn/ops.hpp"

namespace pedx {

// Which token axis an attention layer mixes.
//   Row:      latent image, sequences run along a row (batch = rows).
//   Column:   latent image, sequences run down a column (batch = cols).
//   Spatial:  tubelet tokens within one frame group (batch = groups).
//   Temporal: across frame groups at one spatial location (batch = rows*cols),
//             or across frames for a per-frame encoder (batch = 1).
enum class Stage { Row, Column, Spatial, Temporal };
std::string_view to_string(Stage s) noexcept;
Stage parse_stage(std::string_view s);

// Layout of the tokens an attention stack refers to, in model-input pixels.
struct TokenGrid {
    std::size_t input_size = 0;        // S
    std::size_t frames = 0;            // t
    std::size_t groups = 1;            // temporal token groups
    std::size_t frames_per_group = 0;  // frames covered by one group
    std::size_t rows = 1;              // spatial token grid
    std::size_t cols = 1;
    std::size_t spatial_tokens() const noexcept { return rows * cols; }
};

struct AttentionLayer {
    Stage stage = Stage::Spatial;
    std::size_t block = 0;
    nn::AttentionWeights weights;
};

struct AttentionStack {
    TokenGrid grid;
    std::vector<AttentionLayer> layers;

    void add(Stage stage, std::size_t block, nn::AttentionWeights w) {
        layers.push_back({stage, block, std::move(w)});
    }
};

}  // namespace pedx
