#include "pedx/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "pedx/simd/kernels.hpp"

namespace pedx::nn {

namespace {

template <class T>
using NodePtr = std::shared_ptr<Node<T>>;

template <class T>
void require_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
    if (a.shape() != b.shape())
        throw ShapeError(std::string(op) + ": " + to_string(a.shape()) + " vs " + to_string(b.shape()));
}

// Accumulates g into a parent's gradient when it participates in backward.
template <class T>
T* grad_of(const NodePtr<T>& p) {
    return (p && p->requires_grad) ? p->grad_buffer().data() : nullptr;
}

struct ConvGeometry {
    std::size_t Ti, Hi, Wi, Ci, kt, kh, kw, To, Ho, Wo;
    Triple stride, pad;
};

// Calls fn(col_offset, input_offset) for every in-bounds kernel tap; each tap
// covers Ci contiguous channels on both sides.
template <class Fn>
void for_each_tap(const ConvGeometry& g, Fn&& fn) {
    const std::size_t K = g.kt * g.kh * g.kw * g.Ci;
    std::size_t p = 0;
    for (std::size_t to = 0; to < g.To; ++to)
        for (std::size_t ho = 0; ho < g.Ho; ++ho)
            for (std::size_t wo = 0; wo < g.Wo; ++wo, ++p) {
                std::size_t kidx = 0;
                for (std::size_t a = 0; a < g.kt; ++a) {
                    const long t = long(to * g.stride[0] + a) - long(g.pad[0]);
                    for (std::size_t b = 0; b < g.kh; ++b) {
                        const long h = long(ho * g.stride[1] + b) - long(g.pad[1]);
                        for (std::size_t c = 0; c < g.kw; ++c, kidx += g.Ci) {
                            const long w = long(wo * g.stride[2] + c) - long(g.pad[2]);
                            if (t < 0 || h < 0 || w < 0 || t >= long(g.Ti) || h >= long(g.Hi) || w >= long(g.Wi))
                                continue;
                            fn(p * K + kidx,
                               ((std::size_t(t) * g.Hi + std::size_t(h)) * g.Wi + std::size_t(w)) * g.Ci);
                        }
                    }
                }
            }
}

}  // namespace

template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    require_same_shape(a, b, "add");
    std::vector<T> out(a.values().begin(), a.values().end());
    const auto bv = b.values();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    auto pa = a.node(), pb = b.node();
    return make_result<T>(a.shape(), std::move(out), {pa, pb}, [pa, pb](Node<T>& self) {
        for (const auto& p : {pa, pb})
            if (T* g = grad_of(p))
                for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    });
}

template <class T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
    std::vector<T> out(a.values().begin(), a.values().end());
    for (auto& v : out) v *= factor;
    auto pa = a.node();
    return make_result<T>(a.shape(), std::move(out), {pa}, [pa, factor](Node<T>& self) {
        if (T* g = grad_of(pa))
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += factor * self.grad[i];
    });
}

template <class T>
Tensor<T> relu(const Tensor<T>& x) {
    std::vector<T> out(x.values().begin(), x.values().end());
    for (auto& v : out) v = v > T(0) ? v : T(0);
    auto px = x.node();
    return make_result<T>(x.shape(), std::move(out), {px}, [px](Node<T>& self) {
        if (T* g = grad_of(px))
            for (std::size_t i = 0; i < self.grad.size(); ++i)
                if (px->value[i] > T(0)) g[i] += self.grad[i];
    });
}

template <class T>
Tensor<T> sigmoid(const Tensor<T>& x) {
    std::vector<T> out(x.size());
    const auto xv = x.values();
    for (std::size_t i = 0; i < out.size(); ++i) {
        const T v = xv[i];
        // Split on sign so exp never overflows.
        out[i] = v >= T(0) ? T(1) / (T(1) + std::exp(-v)) : std::exp(v) / (T(1) + std::exp(v));
    }
    auto px = x.node();
    return make_result<T>(x.shape(), std::move(out), {px}, [px](Node<T>& self) {
        if (T* g = grad_of(px))
            for (std::size_t i = 0; i < self.grad.size(); ++i) {
                const T s = self.value[i];
                g[i] += self.grad[i] * s * (T(1) - s);
            }
    });
}

template <class T>
Tensor<T> reshape(const Tensor<T>& x, Shape shape) {
    if (numel(shape) != x.size())
        throw ShapeError("reshape " + to_string(x.shape()) + " -> " + to_string(shape));
    std::vector<T> out(x.values().begin(), x.values().end());
    auto px = x.node();
    return make_result<T>(std::move(shape), std::move(out), {px}, [px](Node<T>& self) {
        if (T* g = grad_of(px))
            for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    });
}

template <class T>
Tensor<T> swap_leading(const Tensor<T>& x) {
    if (x.rank() != 3) throw ShapeError("swap_leading needs rank 3, got " + to_string(x.shape()));
    const std::size_t A = x.dim(0), B = x.dim(1), C = x.dim(2);
    std::vector<T> out(x.size());
    const auto xv = x.values();
    for (std::size_t a = 0; a < A; ++a)
        for (std::size_t b = 0; b < B; ++b)
            std::copy_n(xv.data() + (a * B + b) * C, C, out.data() + (b * A + a) * C);
    auto px = x.node();
    return make_result<T>({B, A, C}, std::move(out), {px}, [px, A, B, C](Node<T>& self) {
        if (T* g = grad_of(px))
            for (std::size_t a = 0; a < A; ++a)
                for (std::size_t b = 0; b < B; ++b) {
                    const T* src = self.grad.data() + (b * A + a) * C;
                    T* dst = g + (a * B + b) * C;
                    for (std::size_t c = 0; c < C; ++c) dst[c] += src[c];
                }
    });
}

template <class T>
Tensor<T> linear(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
    if (w.rank() != 2 || x.rank() < 1 || x.shape().back() != w.dim(0))
        throw ShapeError("linear: x " + to_string(x.shape()) + " W " + to_string(w.shape()));
    const std::size_t in = w.dim(0), outd = w.dim(1), rows = x.size() / in;
    if (b.defined() && (b.rank() != 1 || b.dim(0) != outd))
        throw ShapeError("linear: bias " + to_string(b.shape()) + " for out " + std::to_string(outd));
    std::vector<T> out(rows * outd, T(0));
    if (b.defined())
        for (std::size_t r = 0; r < rows; ++r) std::copy(b.values().begin(), b.values().end(), out.begin() + r * outd);
    simd::gemm_nn<T>(rows, outd, in, x.values().data(), in, w.values().data(), outd, out.data(), outd);
    Shape shape = x.shape();
    shape.back() = outd;
    auto px = x.node(), pw = w.node(), pb = b.node();
    return make_result<T>(std::move(shape), std::move(out), {px, pw, pb}, [px, pw, pb, rows, in, outd](Node<T>& self) {
        const T* gy = self.grad.data();
        if (T* gx = grad_of(px)) simd::gemm_nt<T>(rows, in, outd, gy, outd, pw->value.data(), outd, gx, in);
        if (T* gw = grad_of(pw)) simd::gemm_tn<T>(in, outd, rows, px->value.data(), in, gy, outd, gw, outd);
        if (T* gb = grad_of(pb))
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t o = 0; o < outd; ++o) gb[o] += gy[r * outd + o];
    });
}

template <class T>
Tensor<T> softmax(const Tensor<T>& x) {
    const std::size_t d = x.shape().back(), rows = x.size() / d;
    std::vector<T> out(x.size());
    const auto xv = x.values();
    for (std::size_t r = 0; r < rows; ++r) {
        const T* in = xv.data() + r * d;
        T* o = out.data() + r * d;
        const T mx = *std::max_element(in, in + d);
        T sum = 0;
        for (std::size_t i = 0; i < d; ++i) sum += (o[i] = std::exp(in[i] - mx));
        for (std::size_t i = 0; i < d; ++i) o[i] /= sum;
    }
    auto px = x.node();
    return make_result<T>(x.shape(), std::move(out), {px}, [px, rows, d](Node<T>& self) {
        if (T* g = grad_of(px))
            for (std::size_t r = 0; r < rows; ++r) {
                const T* s = self.value.data() + r * d;
                const T* gy = self.grad.data() + r * d;
                T inner = 0;
                for (std::size_t i = 0; i < d; ++i) inner += gy[i] * s[i];
                for (std::size_t i = 0; i < d; ++i) g[r * d + i] += s[i] * (gy[i] - inner);
            }
    });
}

template <class T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, double eps) {
    const std::size_t d = x.shape().back(), rows = x.size() / d;
    if (gain.size() != d || bias.size() != d)
        throw ShapeError("layer_norm: gain/bias must have " + std::to_string(d) + " entries");
    std::vector<T> out(x.size()), xhat(x.size()), rstd(rows);
    const auto xv = x.values();
    const auto gv = gain.values(), bv = bias.values();
    for (std::size_t r = 0; r < rows; ++r) {
        const T* in = xv.data() + r * d;
        T mean = 0;
        for (std::size_t i = 0; i < d; ++i) mean += in[i];
        mean /= T(d);
        T var = 0;
        for (std::size_t i = 0; i < d; ++i) var += (in[i] - mean) * (in[i] - mean);
        var /= T(d);
        rstd[r] = T(1) / std::sqrt(var + T(eps));
        for (std::size_t i = 0; i < d; ++i) {
            const T h = (in[i] - mean) * rstd[r];
            xhat[r * d + i] = h;
            out[r * d + i] = h * gv[i] + bv[i];
        }
    }
    auto px = x.node(), pg = gain.node(), pb = bias.node();
    return make_result<T>(x.shape(), std::move(out), {px, pg, pb},
                          [px, pg, pb, rows, d, xhat = std::move(xhat), rstd = std::move(rstd)](Node<T>& self) {
                              T* gx = grad_of(px);
                              T* gg = grad_of(pg);
                              T* gb = grad_of(pb);
                              std::vector<T> gh(d);
                              for (std::size_t r = 0; r < rows; ++r) {
                                  const T* gy = self.grad.data() + r * d;
                                  const T* h = xhat.data() + r * d;
                                  T mean_g = 0, mean_gh = 0;
                                  for (std::size_t i = 0; i < d; ++i) {
                                      if (gg) gg[i] += gy[i] * h[i];
                                      if (gb) gb[i] += gy[i];
                                      gh[i] = gy[i] * pg->value[i];
                                      mean_g += gh[i];
                                      mean_gh += gh[i] * h[i];
                                  }
                                  if (!gx) continue;
                                  mean_g /= T(d);
                                  mean_gh /= T(d);
                                  for (std::size_t i = 0; i < d; ++i)
                                      gx[r * d + i] += rstd[r] * (gh[i] - mean_g - h[i] * mean_gh);
                              }
                          });
}

template <class T>
Tensor<T> mean_leading(const Tensor<T>& x) {
    const std::size_t c = x.shape().back(), rows = x.size() / c;
    std::vector<T> out(c, T(0));
    const auto xv = x.values();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t i = 0; i < c; ++i) out[i] += xv[r * c + i];
    for (auto& v : out) v /= T(rows);
    auto px = x.node();
    return make_result<T>({c}, std::move(out), {px}, [px, rows, c](Node<T>& self) {
        if (T* g = grad_of(px))
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t i = 0; i < c; ++i) g[r * c + i] += self.grad[i] / T(rows);
    });
}

template <class T>
Tensor<T> mean_middle(const Tensor<T>& x) {
    if (x.rank() != 3) throw ShapeError("mean_middle expects (A, B, C), got " + to_string(x.shape()));
    const std::size_t a = x.dim(0), b = x.dim(1), c = x.dim(2);
    std::vector<T> out(a * c, T(0));
    const auto xv = x.values();
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j)
            for (std::size_t k = 0; k < c; ++k) out[i * c + k] += xv[(i * b + j) * c + k];
    for (auto& v : out) v /= T(b);
    auto px = x.node();
    return make_result<T>({a, c}, std::move(out), {px}, [px, a, b, c](Node<T>& self) {
        if (T* g = grad_of(px))
            for (std::size_t i = 0; i < a; ++i)
                for (std::size_t j = 0; j < b; ++j)
                    for (std::size_t k = 0; k < c; ++k) g[(i * b + j) * c + k] += self.grad[i * c + k] / T(b);
    });
}

template <class T>
Tensor<T> global_avg_pool(const Tensor<T>& x) {
    if (x.rank() != 3) throw ShapeError("global_avg_pool expects (H, W, C), got " + to_string(x.shape()));
    return mean_leading(x);
}

template <class T>
Tensor<T> mean_pool_over_sequence(const Tensor<T>& x) {
    if (x.rank() != 2) throw ShapeError("mean_pool_over_sequence expects (t, d), got " + to_string(x.shape()));
    return mean_leading(x);
}

template <class T>
Tensor<T> mean_all(const Tensor<T>& x) {
    return mean_leading(reshape(x, {x.size(), 1}));
}

template <class T>
Tensor<T> bce_loss(const Tensor<T>& p, T label) {
    if (p.size() != 1) throw ShapeError("bce_loss expects one probability, got " + to_string(p.shape()));
    const T lo = T(kProbClamp), hi = T(1) - T(kProbClamp);
    const T raw = p.values()[0];
    const T pc = std::clamp(raw, lo, hi);
    const T loss = -(label * std::log(pc) + (T(1) - label) * std::log(T(1) - pc));
    auto pp = p.node();
    return make_result<T>({1}, {loss}, {pp}, [pp, pc, label, raw, lo, hi](Node<T>& self) {
        if (T* g = grad_of(pp)) {
            if (raw < lo || raw > hi) return;  // clamped: flat
            g[0] += self.grad[0] * (-(label / pc) + (T(1) - label) / (T(1) - pc));
        }
    });
}

std::size_t conv_out_dim(std::size_t in, std::size_t k, std::size_t stride, std::size_t pad) {
    if (stride == 0) throw ShapeError("conv stride must be positive");
    if (in + 2 * pad < k)
        throw ShapeError("conv input " + std::to_string(in) + " (pad " + std::to_string(pad) + ") smaller than kernel " +
                         std::to_string(k));
    return (in + 2 * pad - k) / stride + 1;
}

template <class T>
Tensor<T> conv3d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, Triple stride, Triple pad) {
    if (x.rank() != 4 || w.rank() != 5 || w.dim(3) != x.dim(3))
        throw ShapeError("conv3d: x " + to_string(x.shape()) + " w " + to_string(w.shape()));
    const std::size_t Ti = x.dim(0), Hi = x.dim(1), Wi = x.dim(2), Ci = x.dim(3);
    const std::size_t kt = w.dim(0), kh = w.dim(1), kw = w.dim(2), Co = w.dim(4);
    if (b.defined() && b.size() != Co) throw ShapeError("conv3d: bias size mismatch");
    const std::size_t To = conv_out_dim(Ti, kt, stride[0], pad[0]);
    const std::size_t Ho = conv_out_dim(Hi, kh, stride[1], pad[1]);
    const std::size_t Wo = conv_out_dim(Wi, kw, stride[2], pad[2]);
    const std::size_t P = To * Ho * Wo, K = kt * kh * kw * Ci;

    const ConvGeometry geo{Ti, Hi, Wi, Ci, kt, kh, kw, To, Ho, Wo, stride, pad};

    // im2col: each output position gets its (kt, kh, kw, Ci) patch as a row.
    std::vector<T> col(P * K, T(0));
    const auto xv = x.values();
    for_each_tap(geo, [&](std::size_t dst, std::size_t src) { std::copy_n(xv.data() + src, Ci, col.data() + dst); });

    std::vector<T> out(P * Co, T(0));
    if (b.defined())
        for (std::size_t p = 0; p < P; ++p) std::copy(b.values().begin(), b.values().end(), out.begin() + p * Co);
    simd::gemm_nn<T>(P, Co, K, col.data(), K, w.values().data(), Co, out.data(), Co);

    auto px = x.node(), pw = w.node(), pb = b.node();
    return make_result<T>(
        {To, Ho, Wo, Co}, std::move(out), {px, pw, pb},
        [px, pw, pb, P, K, Co, Ci, geo, col = std::move(col)](Node<T>& self) {
            const T* gy = self.grad.data();
            if (T* gw = grad_of(pw)) simd::gemm_tn<T>(K, Co, P, col.data(), K, gy, Co, gw, Co);
            if (T* gb = grad_of(pb))
                for (std::size_t p = 0; p < P; ++p)
                    for (std::size_t o = 0; o < Co; ++o) gb[o] += gy[p * Co + o];
            if (T* gx = grad_of(px)) {
                std::vector<T> gcol(P * K, T(0));
                simd::gemm_nt<T>(P, K, Co, gy, Co, pw->value.data(), Co, gcol.data(), K);
                for_each_tap(geo, [&](std::size_t srcc, std::size_t dstx) {
                    for (std::size_t c = 0; c < Ci; ++c) gx[dstx + c] += gcol[srcc + c];
                });
            }
        });
}

template <class T>
Tensor<T> conv2d(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b, std::array<std::size_t, 2> stride,
                 std::array<std::size_t, 2> pad) {
    if (x.rank() != 3 || w.rank() != 4)
        throw ShapeError("conv2d: x " + to_string(x.shape()) + " w " + to_string(w.shape()));
    auto x4 = reshape(x, {1, x.dim(0), x.dim(1), x.dim(2)});
    auto w5 = reshape(w, {1, w.dim(0), w.dim(1), w.dim(2), w.dim(3)});
    auto y = conv3d(x4, w5, b, {1, stride[0], stride[1]}, {0, pad[0], pad[1]});
    return reshape(y, {y.dim(1), y.dim(2), y.dim(3)});
}

template <class T>
Tensor<T> scaled_dot_product_attention(const Tensor<T>& q, const Tensor<T>& k, const Tensor<T>& v,
                                       std::size_t heads, AttentionWeights* record) {
    if (q.rank() != 3 || k.shape() != v.shape() || q.dim(0) != k.dim(0) || q.dim(2) != k.dim(2))
        throw ShapeError("attention: q " + to_string(q.shape()) + " k " + to_string(k.shape()) + " v " +
                         to_string(v.shape()));
    const std::size_t B = q.dim(0), Lq = q.dim(1), Lk = k.dim(1), d = q.dim(2);
    if (heads == 0 || d % heads != 0)
        throw ShapeError("attention: model dim " + std::to_string(d) + " not divisible by heads " +
                         std::to_string(heads));
    const std::size_t dh = d / heads;
    const T sc = T(1) / std::sqrt(T(dh));

    std::vector<T> probs(B * heads * Lq * Lk, T(0));
    std::vector<T> out(B * Lq * d, T(0));
    const T* Q = q.values().data();
    const T* K = k.values().data();
    const T* V = v.values().data();
    for (std::size_t bi = 0; bi < B; ++bi)
        for (std::size_t h = 0; h < heads; ++h) {
            T* P = probs.data() + (bi * heads + h) * Lq * Lk;
            const std::size_t off_q = bi * Lq * d + h * dh, off_k = bi * Lk * d + h * dh;
            simd::gemm_nt<T>(Lq, Lk, dh, Q + off_q, d, K + off_k, d, P, Lk);
            for (std::size_t i = 0; i < Lq; ++i) {
                T* row = P + i * Lk;
                T mx = row[0] * sc;
                for (std::size_t j = 0; j < Lk; ++j) mx = std::max(mx, row[j] * sc);
                T sum = 0;
                for (std::size_t j = 0; j < Lk; ++j) sum += (row[j] = std::exp(row[j] * sc - mx));
                for (std::size_t j = 0; j < Lk; ++j) row[j] /= sum;
            }
            simd::gemm_nn<T>(Lq, dh, Lk, P, Lk, V + off_k, d, out.data() + off_q, d);
        }

    if (record) {
        record->batch = B;
        record->heads = heads;
        record->queries = Lq;
        record->keys = Lk;
        record->values.assign(probs.begin(), probs.end());
    }

    auto pq = q.node(), pk = k.node(), pv = v.node();
    return make_result<T>(
        {B, Lq, d}, std::move(out), {pq, pk, pv},
        [pq, pk, pv, B, Lq, Lk, d, dh, heads, sc, probs = std::move(probs)](Node<T>& self) {
            T* gq = grad_of(pq);
            T* gk = grad_of(pk);
            T* gv = grad_of(pv);
            std::vector<T> dP(Lq * Lk);
            for (std::size_t bi = 0; bi < B; ++bi)
                for (std::size_t h = 0; h < heads; ++h) {
                    const T* P = probs.data() + (bi * heads + h) * Lq * Lk;
                    const std::size_t off_q = bi * Lq * d + h * dh, off_k = bi * Lk * d + h * dh;
                    const T* gO = self.grad.data() + off_q;
                    if (gv) simd::gemm_tn<T>(Lk, dh, Lq, P, Lk, gO, d, gv + off_k, d);
                    if (!gq && !gk) continue;
                    std::fill(dP.begin(), dP.end(), T(0));
                    simd::gemm_nt<T>(Lq, Lk, dh, gO, d, pv->value.data() + off_k, d, dP.data(), Lk);
                    for (std::size_t i = 0; i < Lq; ++i) {
                        const T* p = P + i * Lk;
                        T* g = dP.data() + i * Lk;
                        T inner = 0;
                        for (std::size_t j = 0; j < Lk; ++j) inner += g[j] * p[j];
                        for (std::size_t j = 0; j < Lk; ++j) g[j] = p[j] * (g[j] - inner) * sc;
                    }
                    if (gq) simd::gemm_nn<T>(Lq, dh, Lk, dP.data(), Lk, pk->value.data() + off_k, d, gq + off_q, d);
                    if (gk) simd::gemm_tn<T>(Lk, dh, Lq, dP.data(), Lk, pq->value.data() + off_q, d, gk + off_k, d);
                }
        });
}

#define PEDX_INSTANTIATE_OPS(T)                                                                                     \
    template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                                     \
    template Tensor<T> scale(const Tensor<T>&, T);                                                                  \
    template Tensor<T> relu(const Tensor<T>&);                                                                      \
    template Tensor<T> sigmoid(const Tensor<T>&);                                                                   \
    template Tensor<T> reshape(const Tensor<T>&, Shape);                                                            \
    template Tensor<T> swap_leading(const Tensor<T>&);                                                              \
    template Tensor<T> linear(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);                                \
    template Tensor<T> softmax(const Tensor<T>&);                                                                   \
    template Tensor<T> layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, double);                    \
    template Tensor<T> mean_leading(const Tensor<T>&);                                                              \
    template Tensor<T> mean_middle(const Tensor<T>&);                                                               \
    template Tensor<T> global_avg_pool(const Tensor<T>&);                                                           \
    template Tensor<T> mean_pool_over_sequence(const Tensor<T>&);                                                   \
    template Tensor<T> mean_all(const Tensor<T>&);                                                                  \
    template Tensor<T> bce_loss(const Tensor<T>&, T);                                                               \
    template Tensor<T> conv3d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, Triple, Triple);                \
    template Tensor<T> conv2d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::array<std::size_t, 2>,     \
                              std::array<std::size_t, 2>);                                                          \
    template Tensor<T> scaled_dot_product_attention(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&,           \
                                                    std::size_t, AttentionWeights*);

PEDX_INSTANTIATE_OPS(float)
PEDX_INSTANTIATE_OPS(double)

}  // namespace pedx::nn
