#include "pedx/models.hpp"

#include <cmath>

#include "json.hpp"
#include "pedx/error.hpp"

namespace pedx {

using nn::Tensor;

std::string_view to_string(Arch arch) noexcept {
    switch (arch) {
        case Arch::I3d: return "i3d";
        case Arch::I3dTrans: return "i3d-trans";
        case Arch::InceptionTrans: return "inception-trans";
        case Arch::FactorizedVit: return "vivit";
    }
    return "?";
}

Arch parse_arch(std::string_view s) {
    if (s == "i3d" || s == "i3d_lite") return Arch::I3d;
    if (s == "i3d-trans" || s == "i3d_trans") return Arch::I3dTrans;
    if (s == "inception-trans" || s == "inception_trans") return Arch::InceptionTrans;
    if (s == "vivit" || s == "factorized_vit") return Arch::FactorizedVit;
    throw UsageError("unknown architecture '" + std::string(s) + "' (expected i3d, i3d-trans, inception-trans or vivit)");
}

void ModelConfig::validate() const {
    if (input_size == 0 || frames == 0) throw UsageError("input size and frame count must be positive");
    if (heads == 0 || dim % heads != 0)
        throw UsageError("dim " + std::to_string(dim) + " not divisible by heads " + std::to_string(heads));
    if (dim % 2 != 0) throw UsageError("dim must be even");
    if (ffn == 0) throw UsageError("ffn width must be positive");
    for (auto c : conv_channels)
        if (c == 0) throw UsageError("conv channel widths must be positive");
    if (arch == Arch::FactorizedVit) {
        if (tubelet_size == 0 || input_size % tubelet_size != 0)
            throw UsageError("input size " + std::to_string(input_size) + " not divisible by tubelet size " +
                             std::to_string(tubelet_size));
        if (tubelet_frames == 0 || frames % tubelet_frames != 0)
            throw UsageError("frame count " + std::to_string(frames) + " not divisible by tubelet frames " +
                             std::to_string(tubelet_frames));
    }
}

std::string ModelConfig::to_json() const {
    nlohmann::ordered_json j;
    j["arch"] = to_string(arch);
    j["input_size"] = input_size;
    j["frames"] = frames;
    j["dim"] = dim;
    j["heads"] = heads;
    j["ffn"] = ffn;
    j["blocks"] = blocks;
    j["conv_channels"] = conv_channels;
    j["tubelet_frames"] = tubelet_frames;
    j["tubelet_size"] = tubelet_size;
    j["positional"] = positional;
    j["seed"] = seed;
    return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        ModelConfig c;
        c.arch = parse_arch(j.at("arch").get<std::string>());
        c.input_size = j.at("input_size").get<std::size_t>();
        c.frames = j.at("frames").get<std::size_t>();
        c.dim = j.at("dim").get<std::size_t>();
        c.heads = j.at("heads").get<std::size_t>();
        c.ffn = j.at("ffn").get<std::size_t>();
        c.blocks = j.at("blocks").get<std::size_t>();
        c.conv_channels = j.at("conv_channels").get<std::vector<std::size_t>>();
        c.tubelet_frames = j.at("tubelet_frames").get<std::size_t>();
        c.tubelet_size = j.at("tubelet_size").get<std::size_t>();
        c.positional = j.at("positional").get<bool>();
        c.seed = j.at("seed").get<std::uint64_t>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("bad model config: ") + e.what());
    }
}

template <class T>
Tensor<T> clip_tensor(const CropClip& clip, bool flip) {
    if (clip.frames.empty()) throw DataError("empty clip " + clip.track_id);
    const std::size_t S = clip.size;
    std::vector<T> v;
    v.reserve(clip.frames.size() * S * S * 3);
    for (const auto& f : clip.frames) {
        if (f.width != S || f.height != S || f.channels != 3)
            throw DataError("clip " + clip.track_id + " has a frame that is not " + std::to_string(S) + "x" +
                            std::to_string(S) + "x3");
        for (std::size_t y = 0; y < S; ++y)
            for (std::size_t x = 0; x < S; ++x)
                for (std::size_t c = 0; c < 3; ++c)
                    v.push_back(T(f.at(flip ? S - 1 - x : x, y, c)) / T(255) - T(0.5));
    }
    return Tensor<T>::constant({clip.frames.size(), S, S, 3}, std::move(v));
}

namespace {

template <class T>
Conv3dLayer<T> make_conv(nn::Triple k, std::size_t cin, std::size_t cout, nn::Triple stride, nn::Triple pad,
                         Rng& rng) {
    Conv3dLayer<T> l;
    const std::size_t fan_in = k[0] * k[1] * k[2] * cin;
    l.weight = nn::init_uniform<T>({k[0], k[1], k[2], cin, cout}, fan_in, rng, std::sqrt(6.0));
    l.bias = Tensor<T>::parameter({cout}, std::vector<T>(cout, T(0)));
    l.stride = stride;
    l.pad = pad;
    return l;
}

template <class T>
void collect_convs(const std::vector<Conv3dLayer<T>>& layers, const std::string& prefix, nn::ParamList<T>& out) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        out.push_back({prefix + ".conv" + std::to_string(i) + ".weight", layers[i].weight});
        out.push_back({prefix + ".conv" + std::to_string(i) + ".bias", layers[i].bias});
    }
}

std::vector<std::size_t> widths(const ModelConfig& cfg) {
    std::vector<std::size_t> w{3};
    w.insert(w.end(), cfg.conv_channels.begin(), cfg.conv_channels.end());
    w.push_back(cfg.dim);
    return w;
}

}  // namespace

template <class T>
I3dBackbone<T>::I3dBackbone(const ModelConfig& cfg, Rng& rng) {
    const auto w = widths(cfg);
    std::size_t t = cfg.frames, s = cfg.input_size;
    const std::size_t n = w.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const bool last = i + 1 == n;
        std::size_t kt = 1, st = 1, pt = 0;
        if (last) {
            kt = t;
        } else if (t > 1) {
            kt = 3;
            st = 2;
            pt = 1;
        }
        layers.push_back(make_conv<T>({kt, 3, 3}, w[i], w[i + 1], {st, 2, 2}, {pt, 1, 1}, rng));
        t = nn::conv_out_dim(t, kt, st, pt);
        s = nn::conv_out_dim(s, 3, 2, 1);
    }
    rows = cols = s;
}

template <class T>
Tensor<T> I3dBackbone<T>::operator()(const Tensor<T>& clip) const {
    Tensor<T> h = clip;
    for (const auto& l : layers) h = nn::relu(l(h));
    return nn::reshape(h, {h.dim(1), h.dim(2), h.dim(3)});
}

template <class T>
void I3dBackbone<T>::collect(const std::string& prefix, nn::ParamList<T>& out) const {
    collect_convs(layers, prefix, out);
}

template <class T>
FrameEncoder<T>::FrameEncoder(const ModelConfig& cfg, Rng& rng) {
    const auto w = widths(cfg);
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        layers.push_back(make_conv<T>({1, 3, 3}, w[i], w[i + 1], {1, 2, 2}, {0, 1, 1}, rng));
    proj = nn::Linear<T>(cfg.dim, cfg.dim, rng);
}

template <class T>
Tensor<T> FrameEncoder<T>::operator()(const Tensor<T>& clip) const {
    Tensor<T> h = clip;
    for (const auto& l : layers) h = nn::relu(l(h));
    h = nn::mean_middle(nn::reshape(h, {h.dim(0), h.dim(1) * h.dim(2), h.dim(3)}));
    return proj(h);
}

template <class T>
void FrameEncoder<T>::collect(const std::string& prefix, nn::ParamList<T>& out) const {
    collect_convs(layers, prefix, out);
    proj.collect(prefix + ".proj", out);
}

template <class T>
void Model<T>::check_input(const Tensor<T>& clip) const {
    const nn::Shape want{cfg_.frames, cfg_.input_size, cfg_.input_size, 3};
    if (clip.shape() != want)
        throw ShapeError(std::string(to_string(cfg_.arch)) + " expects clip " + nn::to_string(want) + ", got " +
                         nn::to_string(clip.shape()));
}

template <class T>
Tensor<T> Model<T>::logit(const Tensor<T>& clip, AttentionStack* record) const {
    check_input(clip);
    if (record) {
        record->layers.clear();
        record->grid = grid();
    }
    return head_(pooled(clip, record));
}

template <class T>
Tensor<T> Model<T>::forward(const Tensor<T>& clip, AttentionStack* record) const {
    return nn::sigmoid(logit(clip, record));
}

template <class T>
nn::ParamList<T> Model<T>::parameters() const {
    nn::ParamList<T> out;
    collect(out);
    head_.collect("head", out);
    return out;
}

namespace {

template <class T>
class I3dModel final : public Model<T> {
public:
    I3dModel(const ModelConfig& cfg, Rng& rng) : Model<T>(cfg), backbone_(cfg, rng) {
        this->head_ = nn::Linear<T>(cfg.dim, 1, rng, true);
    }
    TokenGrid grid() const override {
        return {this->cfg_.input_size, this->cfg_.frames, 1, this->cfg_.frames, backbone_.rows, backbone_.cols};
    }

protected:
    Tensor<T> pooled(const Tensor<T>& clip, AttentionStack*) const override {
        return nn::global_avg_pool(backbone_(clip));
    }
    void collect(nn::ParamList<T>& out) const override { backbone_.collect("backbone", out); }

private:
    I3dBackbone<T> backbone_;
};

template <class T>
class I3dTransModel final : public Model<T> {
public:
    I3dTransModel(const ModelConfig& cfg, Rng& rng) : Model<T>(cfg), backbone_(cfg, rng) {
        SeqSpatialConfig sc;
        sc.rows = backbone_.rows;
        sc.cols = backbone_.cols;
        sc.in_dim = sc.dim = cfg.dim;
        sc.heads = cfg.heads;
        sc.ffn = cfg.ffn;
        sc.blocks = cfg.blocks;
        sc.positional = cfg.positional;
        transformer_ = SeqSpatialTransformer<T>(sc, rng);
        this->head_ = nn::Linear<T>(cfg.dim, 1, rng, true);
    }
    TokenGrid grid() const override {
        return {this->cfg_.input_size, this->cfg_.frames, 1, this->cfg_.frames, backbone_.rows, backbone_.cols};
    }

protected:
    Tensor<T> pooled(const Tensor<T>& clip, AttentionStack* record) const override {
        return nn::global_avg_pool(transformer_(backbone_(clip), record));
    }
    void collect(nn::ParamList<T>& out) const override {
        backbone_.collect("backbone", out);
        transformer_.collect("seq", out);
    }

private:
    I3dBackbone<T> backbone_;
    SeqSpatialTransformer<T> transformer_;
};

template <class T>
Tensor<T> add_table(const Tensor<T>& x, const std::vector<double>& table) {
    return nn::add(x, Tensor<T>::constant(x.shape(), std::vector<T>(table.begin(), table.end())));
}

template <class T>
class InceptionTransModel final : public Model<T> {
public:
    InceptionTransModel(const ModelConfig& cfg, Rng& rng) : Model<T>(cfg), encoder_(cfg, rng) {
        for (std::size_t i = 0; i < cfg.blocks; ++i) blocks_.emplace_back(cfg.dim, cfg.heads, cfg.ffn, rng);
        this->head_ = nn::Linear<T>(cfg.dim, 1, rng, true);
    }
    TokenGrid grid() const override { return {this->cfg_.input_size, this->cfg_.frames, this->cfg_.frames, 1, 1, 1}; }

protected:
    Tensor<T> pooled(const Tensor<T>& clip, AttentionStack* record) const override {
        auto h = encoder_(clip);
        if (this->cfg_.positional) h = add_table(h, nn::sinusoidal_table(h.dim(0), h.dim(1)));
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            nn::AttentionWeights w;
            h = blocks_[i](h, record ? &w : nullptr);
            if (record) record->add(Stage::Temporal, i, std::move(w));
        }
        return nn::mean_pool_over_sequence(h);
    }
    void collect(nn::ParamList<T>& out) const override {
        encoder_.collect("encoder", out);
        for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i].collect("block" + std::to_string(i), out);
    }

private:
    FrameEncoder<T> encoder_;
    std::vector<nn::EncoderBlock<T>> blocks_;
};

// Spatial attention within each frame group, then temporal attention across
// groups at each spatial location, then a feed-forward layer; each sub-layer
// is residual + post layer norm.
template <class T>
struct FactorizedBlock {
    nn::MultiHeadAttention<T> spatial, temporal;
    nn::LayerNorm<T> norm_s, norm_t, norm_f;
    nn::FeedForward<T> ffn;

    FactorizedBlock(const ModelConfig& cfg, Rng& rng)
        : spatial(cfg.dim, cfg.heads, rng),
          temporal(cfg.dim, cfg.heads, rng),
          norm_s(cfg.dim),
          norm_t(cfg.dim),
          norm_f(cfg.dim),
          ffn(cfg.dim, cfg.ffn, rng) {}

    // x: (groups, tokens, d)
    Tensor<T> operator()(const Tensor<T>& x, AttentionStack* record, std::size_t index) const {
        nn::AttentionWeights ws, wt;
        auto h = norm_s(nn::add(x, spatial(x, record ? &ws : nullptr)));
        h = norm_t(nn::add(h, nn::swap_leading(temporal(nn::swap_leading(h), record ? &wt : nullptr))));
        if (record) {
            record->add(Stage::Spatial, index, std::move(ws));
            record->add(Stage::Temporal, index, std::move(wt));
        }
        return norm_f(nn::add(h, ffn(h)));
    }
    void collect(const std::string& prefix, nn::ParamList<T>& out) const {
        spatial.collect(prefix + ".spatial", out);
        norm_s.collect(prefix + ".norm_s", out);
        temporal.collect(prefix + ".temporal", out);
        norm_t.collect(prefix + ".norm_t", out);
        ffn.collect(prefix + ".ffn", out);
        norm_f.collect(prefix + ".norm_f", out);
    }
};

template <class T>
class FactorizedVitModel final : public Model<T> {
public:
    FactorizedVitModel(const ModelConfig& cfg, Rng& rng) : Model<T>(cfg) {
        const std::size_t tt = cfg.tubelet_frames, ts = cfg.tubelet_size;
        embed_ = make_conv<T>({tt, ts, ts}, 3, cfg.dim, {tt, ts, ts}, {0, 0, 0}, rng);
        for (std::size_t i = 0; i < cfg.blocks; ++i) blocks_.emplace_back(cfg, rng);
        this->head_ = nn::Linear<T>(cfg.dim, 1, rng, true);
    }
    TokenGrid grid() const override {
        const auto& c = this->cfg_;
        const std::size_t side = c.input_size / c.tubelet_size;
        return {c.input_size, c.frames, c.frames / c.tubelet_frames, c.tubelet_frames, side, side};
    }

protected:
    Tensor<T> pooled(const Tensor<T>& clip, AttentionStack* record) const override {
        const TokenGrid g = grid();
        const std::size_t d = this->cfg_.dim, P = g.spatial_tokens();
        auto h = nn::reshape(embed_(clip), {g.groups, P, d});
        if (this->cfg_.positional) h = add_table(h, nn::sinusoidal_table(g.groups * P, d));
        for (std::size_t i = 0; i < blocks_.size(); ++i) h = blocks_[i](h, record, i);
        return nn::mean_pool_over_sequence(nn::reshape(h, {g.groups * P, d}));
    }
    void collect(nn::ParamList<T>& out) const override {
        out.push_back({"tubelet.weight", embed_.weight});
        out.push_back({"tubelet.bias", embed_.bias});
        for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i].collect("block" + std::to_string(i), out);
    }

private:
    Conv3dLayer<T> embed_;
    std::vector<FactorizedBlock<T>> blocks_;
};

}  // namespace

template <class T>
std::unique_ptr<Model<T>> make_model(const ModelConfig& cfg) {
    cfg.validate();
    Rng rng(Rng::derive(cfg.seed, 0x6d6f64656cULL));
    switch (cfg.arch) {
        case Arch::I3d: return std::make_unique<I3dModel<T>>(cfg, rng);
        case Arch::I3dTrans: return std::make_unique<I3dTransModel<T>>(cfg, rng);
        case Arch::InceptionTrans: return std::make_unique<InceptionTransModel<T>>(cfg, rng);
        case Arch::FactorizedVit: return std::make_unique<FactorizedVitModel<T>>(cfg, rng);
    }
    throw UsageError("unknown architecture");
}

#define PEDX_INSTANTIATE_MODELS(T)                                  \
    template Tensor<T> clip_tensor<T>(const CropClip&, bool);       \
    template struct I3dBackbone<T>;                                 \
    template struct FrameEncoder<T>;                                \
    template class Model<T>;                                        \
    template std::unique_ptr<Model<T>> make_model<T>(const ModelConfig&);

PEDX_INSTANTIATE_MODELS(float)
PEDX_INSTANTIATE_MODELS(double)

}  // namespace pedx
