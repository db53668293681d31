#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pedx/attention.hpp"
#include "pedx/cropper.hpp"
#include "pedx/nn/layers.hpp"
#include "pedx/spatialattn.hpp"

namespace pedx {

enum class Arch { I3d, I3dTrans, InceptionTrans, FactorizedVit };
// CLI names: i3d, i3d-trans, inception-trans, vivit.
std::string_view to_string(Arch arch) noexcept;
Arch parse_arch(std::string_view s);
inline constexpr Arch kAllArchs[] = {Arch::I3d, Arch::I3dTrans, Arch::InceptionTrans, Arch::FactorizedVit};

// Toy layer lists (S = 64, t = 8, defaults):
//   i3d backbone:    conv3d k3 s2 p1  3->8   (8,64,64) -> (4,32,32)
//                    conv3d k3 s2 p1  8->16            -> (2,16,16)
//                    conv3d k3 s2 p1 16->32            -> (1,8,8)
//                    conv3d (1,3,3) s(1,2,2) 32->64    -> (1,4,4)   latent (4,4,64)
//                    (temporal kernel/stride drop to 1 once t reaches 1; the
//                    last layer spans whatever temporal extent is left)
//   frame encoder:   same widths with kt = 1, spatial mean, linear d->d
//   tubelets:        (tubelet_frames, tubelet_size, tubelet_size) patches
//                    -> d, i.e. 4 groups x 16 tokens at the defaults
struct ModelConfig {
    Arch arch = Arch::FactorizedVit;
    std::size_t input_size = 64;
    std::size_t frames = 8;
    std::size_t dim = 64;
    std::size_t heads = 4;
    std::size_t ffn = 128;
    std::size_t blocks = 2;
    std::vector<std::size_t> conv_channels{8, 16, 32};
    std::size_t tubelet_frames = 2;
    std::size_t tubelet_size = 16;
    bool positional = true;
    std::uint64_t seed = 0;

    void validate() const;
    std::string to_json() const;
    static ModelConfig from_json(const std::string& text);
    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Clip pixels to a (t, S, S, 3) tensor, u8 / 255 - 0.5, optionally mirrored.
template <class T>
nn::Tensor<T> clip_tensor(const CropClip& clip, bool flip = false);

template <class T>
struct Conv3dLayer {
    nn::Tensor<T> weight;  // (kt, kh, kw, Cin, Cout)
    nn::Tensor<T> bias;
    nn::Triple stride{1, 1, 1};
    nn::Triple pad{0, 0, 0};

    nn::Tensor<T> operator()(const nn::Tensor<T>& x) const { return nn::conv3d(x, weight, bias, stride, pad); }
};

// Strided 3-D convolutions collapsing time to 1: (t, S, S, 3) -> (rows, cols, d).
template <class T>
struct I3dBackbone {
    std::vector<Conv3dLayer<T>> layers;
    std::size_t rows = 0, cols = 0;

    I3dBackbone() = default;
    I3dBackbone(const ModelConfig& cfg, Rng& rng);
    nn::Tensor<T> operator()(const nn::Tensor<T>& clip) const;
    void collect(const std::string& prefix, nn::ParamList<T>& out) const;
};

// Shared per-frame CNN: (t, S, S, 3) -> (t, d).
template <class T>
struct FrameEncoder {
    std::vector<Conv3dLayer<T>> layers;
    nn::Linear<T> proj;

    FrameEncoder() = default;
    FrameEncoder(const ModelConfig& cfg, Rng& rng);
    nn::Tensor<T> operator()(const nn::Tensor<T>& clip) const;
    void collect(const std::string& prefix, nn::ParamList<T>& out) const;
};

template <class T>
class Model {
public:
    explicit Model(ModelConfig cfg) : cfg_(std::move(cfg)) {}
    virtual ~Model() = default;

    const ModelConfig& config() const noexcept { return cfg_; }
    // clip (t, S, S, 3) -> probability of crossing, shape (1).
    nn::Tensor<T> forward(const nn::Tensor<T>& clip, AttentionStack* record = nullptr) const;
    nn::Tensor<T> logit(const nn::Tensor<T>& clip, AttentionStack* record = nullptr) const;
    nn::ParamList<T> parameters() const;
    std::size_t parameter_count() const { return nn::parameter_count(parameters()); }
    virtual TokenGrid grid() const = 0;

protected:
    virtual nn::Tensor<T> pooled(const nn::Tensor<T>& clip, AttentionStack* record) const = 0;
    virtual void collect(nn::ParamList<T>& out) const = 0;
    void check_input(const nn::Tensor<T>& clip) const;

    ModelConfig cfg_;
    nn::Linear<T> head_;  // zero-initialized d -> 1
};

template <class T>
std::unique_ptr<Model<T>> make_model(const ModelConfig& cfg);

}  // namespace pedx
