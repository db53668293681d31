#include "pedx/explainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "pedx/error.hpp"

namespace pedx {

Matrix Matrix::identity(std::size_t size) {
    Matrix m(size);
    for (std::size_t i = 0; i < size; ++i) m(i, i) = 1.0;
    return m;
}

Matrix matmul(const Matrix& x, const Matrix& y) {
    if (x.n != y.n) throw ShapeError("matmul: size mismatch " + std::to_string(x.n) + " vs " + std::to_string(y.n));
    Matrix out(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t k = 0; k < x.n; ++k) {
            const double v = x(i, k);
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < x.n; ++j) out(i, j) += v * y(k, j);
        }
    return out;
}

Matrix head_mean(const nn::AttentionWeights& w, std::size_t item) {
    if (w.queries != w.keys)
        throw ShapeError("attention is not square: " + std::to_string(w.queries) + "x" + std::to_string(w.keys));
    if (item >= w.batch || w.heads == 0) throw ShapeError("attention record has no sequence " + std::to_string(item));
    Matrix m(w.queries);
    for (std::size_t h = 0; h < w.heads; ++h)
        for (std::size_t q = 0; q < w.queries; ++q)
            for (std::size_t k = 0; k < w.keys; ++k) m(q, k) += w.at(item, h, q, k);
    for (double& v : m.a) v /= double(w.heads);
    return m;
}

Matrix residual_adjust(const Matrix& attention) {
    Matrix m = attention;
    for (std::size_t i = 0; i < m.n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) {
            m(i, j) = 0.5 * m(i, j) + (i == j ? 0.5 : 0.0);
            sum += m(i, j);
        }
        for (std::size_t j = 0; j < m.n; ++j) m(i, j) /= sum;
    }
    return m;
}

Matrix rollout(const std::vector<Matrix>& layers) {
    if (layers.empty()) throw ShapeError("rollout needs at least one layer");
    Matrix out = Matrix::identity(layers.front().n);
    for (const auto& l : layers) {
        if (l.n != out.n) throw ShapeError("rollout: token count changes between layers");
        out = matmul(residual_adjust(l), out);
    }
    return out;
}

namespace {

// Scatter one stage's per-sequence attention into a full token matrix.
Matrix expand(const AttentionLayer& layer, const TokenGrid& g) {
    const std::size_t G = g.groups, R = g.rows, C = g.cols, P = R * C, N = G * P;
    const auto& w = layer.weights;
    Matrix full(N);
    auto place = [&](std::size_t item, auto token_of) {
        const Matrix m = head_mean(w, item);
        for (std::size_t q = 0; q < m.n; ++q)
            for (std::size_t k = 0; k < m.n; ++k) full(token_of(q), token_of(k)) = m(q, k);
    };
    auto require = [&](std::size_t batch, std::size_t len) {
        if (w.batch != batch || w.queries != len || w.keys != len)
            throw ShapeError("attention layer (" + std::string(to_string(layer.stage)) + ", block " +
                             std::to_string(layer.block) + ") does not match the token grid");
    };
    switch (layer.stage) {
        case Stage::Row:
            require(G * R, C);
            for (std::size_t b = 0; b < G * R; ++b) place(b, [&](std::size_t i) { return b * C + i; });
            break;
        case Stage::Column:
            require(G * C, R);
            for (std::size_t b = 0; b < G * C; ++b)
                place(b, [&](std::size_t i) { return (b / C) * P + i * C + b % C; });
            break;
        case Stage::Spatial:
            require(G, P);
            for (std::size_t b = 0; b < G; ++b) place(b, [&](std::size_t i) { return b * P + i; });
            break;
        case Stage::Temporal:
            require(P, G);
            for (std::size_t b = 0; b < P; ++b) place(b, [&](std::size_t i) { return i * P + b; });
            break;
    }
    return full;
}

}  // namespace

Matrix rollout(const AttentionStack& stack) {
    const auto& L = stack.layers;
    if (L.empty()) throw ShapeError("rollout needs at least one attention layer");
    std::vector<Matrix> raw;
    for (std::size_t i = 0; i < L.size(); ++i) {
        if (L[i].stage == Stage::Row) {
            if (i + 1 >= L.size() || L[i + 1].stage != Stage::Column || L[i + 1].block != L[i].block)
                throw ShapeError("row attention layer without its column partner");
            raw.push_back(matmul(expand(L[i + 1], stack.grid), expand(L[i], stack.grid)));
            ++i;
        } else if (L[i].stage == Stage::Column) {
            throw ShapeError("column attention layer without a preceding row layer");
        } else {
            raw.push_back(expand(L[i], stack.grid));
        }
    }
    return rollout(raw);
}

std::vector<double> token_relevance(const Matrix& rolled) {
    std::vector<double> r(rolled.n, 0.0);
    for (std::size_t i = 0; i < rolled.n; ++i)
        for (std::size_t j = 0; j < rolled.n; ++j) r[j] += rolled(i, j);
    for (double& v : r) v /= double(rolled.n);
    return r;
}

FactorizedRelevance factorized_rollout(const AttentionStack& stack) {
    const auto& g = stack.grid;
    const std::size_t G = g.groups, P = g.spatial_tokens();
    std::vector<const AttentionLayer*> spatial, temporal;
    for (const auto& l : stack.layers) {
        if (l.stage == Stage::Spatial) spatial.push_back(&l);
        else if (l.stage == Stage::Temporal) temporal.push_back(&l);
        else throw ShapeError("factorized rollout needs spatial and temporal stages only");
    }
    if (spatial.empty() && temporal.empty()) throw ShapeError("factorized rollout: no attention layers");

    FactorizedRelevance out;
    for (std::size_t grp = 0; grp < G; ++grp) {
        if (spatial.empty()) {
            out.spatial.emplace_back(P, 1.0 / double(P));
            continue;
        }
        std::vector<Matrix> layers;
        for (const auto* l : spatial) {
            if (l->weights.batch != G || l->weights.queries != P)
                throw ShapeError("spatial attention does not match the token grid");
            layers.push_back(head_mean(l->weights, grp));
        }
        out.spatial.push_back(token_relevance(rollout(layers)));
    }
    out.temporal.assign(G, 0.0);
    if (temporal.empty()) {
        std::fill(out.temporal.begin(), out.temporal.end(), 1.0 / double(G));
    } else {
        for (std::size_t p = 0; p < P; ++p) {
            std::vector<Matrix> layers;
            for (const auto* l : temporal) {
                if (l->weights.batch != P || l->weights.queries != G)
                    throw ShapeError("temporal attention does not match the token grid");
                layers.push_back(head_mean(l->weights, p));
            }
            const auto r = token_relevance(rollout(layers));
            for (std::size_t grp = 0; grp < G; ++grp) out.temporal[grp] += r[grp] / double(P);
        }
    }
    out.combined.resize(G * P);
    for (std::size_t grp = 0; grp < G; ++grp) {
        double mx = 0.0;
        for (std::size_t p = 0; p < P; ++p) mx = std::max(mx, out.spatial[grp][p] * out.temporal[grp]);
        for (std::size_t p = 0; p < P; ++p)
            out.combined[grp * P + p] = mx > 0.0 ? out.spatial[grp][p] * out.temporal[grp] / mx : 1.0;
    }
    return out;
}

std::vector<std::vector<double>> upsample_relevance(const std::vector<double>& relevance, const TokenGrid& g) {
    const std::size_t P = g.spatial_tokens(), S = g.input_size;
    if (relevance.size() != g.groups * P)
        throw ShapeError("relevance has " + std::to_string(relevance.size()) + " entries, grid has " +
                         std::to_string(g.groups * P) + " tokens");
    if (S == 0 || g.frames != g.groups * g.frames_per_group) throw ShapeError("inconsistent token grid");
    std::vector<std::vector<double>> maps;
    for (std::size_t grp = 0; grp < g.groups; ++grp) {
        std::vector<double> m(S * S);
        const double* r = relevance.data() + grp * P;
        for (std::size_t y = 0; y < S; ++y) {
            const double v = std::clamp((double(y) + 0.5) * double(g.rows) / double(S) - 0.5, 0.0, double(g.rows - 1));
            const auto r0 = std::size_t(v);
            const std::size_t r1 = std::min(r0 + 1, g.rows - 1);
            const double fy = v - double(r0);
            for (std::size_t x = 0; x < S; ++x) {
                const double u =
                    std::clamp((double(x) + 0.5) * double(g.cols) / double(S) - 0.5, 0.0, double(g.cols - 1));
                const auto c0 = std::size_t(u);
                const std::size_t c1 = std::min(c0 + 1, g.cols - 1);
                const double fx = u - double(c0);
                const double top = r[r0 * g.cols + c0] * (1 - fx) + r[r0 * g.cols + c1] * fx;
                const double bot = r[r1 * g.cols + c0] * (1 - fx) + r[r1 * g.cols + c1] * fx;
                m[y * S + x] = top * (1 - fy) + bot * fy;
            }
        }
        for (std::size_t f = 0; f < g.frames_per_group; ++f) maps.push_back(m);
    }
    return maps;
}

Heatmap relevance_to_heatmap(const std::vector<double>& relevance, const TokenGrid& g) {
    for (double v : relevance)
        if (!std::isfinite(v)) throw RuntimeError("relevance is not finite");
    Heatmap h;
    h.size = g.input_size;
    h.frames = upsample_relevance(relevance, g);
    for (auto& m : h.frames) {
        const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
        const double a = *lo, b = *hi;
        for (double& v : m) v = b > a ? (v - a) / (b - a) : 1.0;
    }
    return h;
}

std::array<std::uint8_t, 3> colormap(double v) {
    static constexpr double stops[5][3] = {{0, 0, 128}, {0, 0, 255}, {0, 255, 255}, {255, 255, 0}, {255, 0, 0}};
    v = std::clamp(v, 0.0, 1.0) * 4.0;
    const auto i = std::min<std::size_t>(3, std::size_t(v));
    const double f = v - double(i);
    std::array<std::uint8_t, 3> c{};
    for (std::size_t k = 0; k < 3; ++k)
        c[k] = std::uint8_t(std::lround(stops[i][k] * (1 - f) + stops[i + 1][k] * f));
    return c;
}

Image overlay(const Image& frame, const std::vector<double>& heat) {
    if (frame.channels != 3 || heat.size() != frame.width * frame.height)
        throw ShapeError("overlay: heatmap does not match the frame");
    Image out = frame;
    for (std::size_t y = 0; y < frame.height; ++y)
        for (std::size_t x = 0; x < frame.width; ++x) {
            const double h = std::clamp(heat[y * frame.width + x], 0.0, 1.0);
            const double a = kOverlayAlpha * h;
            const auto c = colormap(h);
            for (std::size_t k = 0; k < 3; ++k)
                out.at(x, y, k) = std::uint8_t(std::lround((1 - a) * frame.at(x, y, k) + a * c[k]));
        }
    return out;
}

Image overlay_strip(const std::vector<Image>& frames, const Heatmap& heat) {
    if (frames.empty() || frames.size() != heat.frames.size())
        throw ShapeError("overlay: " + std::to_string(frames.size()) + " frames but " +
                         std::to_string(heat.frames.size()) + " heatmaps");
    const std::size_t S = heat.size;
    Image strip(S * frames.size(), 2 * S, 3);
    for (std::size_t f = 0; f < frames.size(); ++f) {
        if (frames[f].width != S || frames[f].height != S) throw ShapeError("overlay: frame is not S x S");
        const Image ov = overlay(frames[f], heat.frames[f]);
        for (std::size_t y = 0; y < S; ++y)
            for (std::size_t x = 0; x < S; ++x)
                for (std::size_t k = 0; k < 3; ++k) {
                    strip.at(f * S + x, y, k) = frames[f].at(x, y, k);
                    strip.at(f * S + x, S + y, k) = ov.at(x, y, k);
                }
    }
    return strip;
}

void overlay_export(const std::vector<Image>& frames, const Heatmap& heat, const std::filesystem::path& path) {
    write_png(path, overlay_strip(frames, heat));
}

namespace {

constexpr char kAttnMagic[8] = {'P', 'E', 'D', 'X', 'A', 'T', 'T', 'N'};

void put_u32(std::vector<std::uint8_t>& out, std::uint64_t v) {
    if (v > 0xffffffffULL) throw RuntimeError("attention dump: value too large");
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

struct Reader {
    const std::vector<std::uint8_t>& in;
    std::size_t pos = 0;
    std::uint32_t u32() {
        if (pos + 4 > in.size()) throw DataError("attention dump is truncated");
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(in[pos++]) << (8 * i);
        return v;
    }
};

}  // namespace

std::vector<std::uint8_t> encode_attention(const AttentionStack& stack) {
    std::vector<std::uint8_t> out(kAttnMagic, kAttnMagic + 8);
    put_u32(out, kAttentionDumpVersion);
    put_u32(out, stack.layers.size());
    const auto& g = stack.grid;
    for (auto v : {g.input_size, g.frames, g.groups, g.frames_per_group, g.rows, g.cols}) put_u32(out, v);
    for (const auto& l : stack.layers) {
        const auto& w = l.weights;
        put_u32(out, static_cast<std::uint32_t>(l.stage));
        put_u32(out, l.block);
        for (auto v : {w.batch, w.heads, w.queries, w.keys}) put_u32(out, v);
        for (double d : w.values) {
            const auto f = static_cast<float>(d);
            std::uint32_t u;
            std::memcpy(&u, &f, 4);
            put_u32(out, u);
        }
    }
    return out;
}

AttentionStack decode_attention(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 8 || std::memcmp(bytes.data(), kAttnMagic, 8) != 0) throw DataError("not an attention dump");
    Reader r{bytes, 8};
    if (r.u32() != kAttentionDumpVersion) throw DataError("unsupported attention dump version");
    const std::uint32_t n = r.u32();
    AttentionStack s;
    auto& g = s.grid;
    g.input_size = r.u32();
    g.frames = r.u32();
    g.groups = r.u32();
    g.frames_per_group = r.u32();
    g.rows = r.u32();
    g.cols = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint32_t stage = r.u32();
        if (stage > 3) throw DataError("attention dump: unknown stage tag " + std::to_string(stage));
        AttentionLayer l;
        l.stage = static_cast<Stage>(stage);
        l.block = r.u32();
        auto& w = l.weights;
        w.batch = r.u32();
        w.heads = r.u32();
        w.queries = r.u32();
        w.keys = r.u32();
        const std::size_t count = w.batch * w.heads * w.queries * w.keys;
        if (r.pos + 4 * count > bytes.size()) throw DataError("attention dump is truncated");
        w.values.resize(count);
        for (auto& v : w.values) {
            const std::uint32_t u = r.u32();
            float f;
            std::memcpy(&f, &u, 4);
            v = f;
        }
        s.layers.push_back(std::move(l));
    }
    if (r.pos != bytes.size()) throw DataError("attention dump has trailing bytes");
    return s;
}

}  // namespace pedx
