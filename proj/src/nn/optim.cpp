#include "pedx/nn/optim.hpp"

#include <cmath>

namespace pedx::nn {

template <class T>
std::size_t parameter_count(const ParamList<T>& params) {
    std::size_t n = 0;
    for (const auto& p : params) n += p.tensor.size();
    return n;
}

template <class T>
void zero_grads(ParamList<T>& params) {
    for (auto& p : params) p.tensor.zero_grad();
}

template <class T>
Tensor<T> init_uniform(Shape shape, std::size_t fan_in, Rng& rng, double gain) {
    const double bound = gain / std::sqrt(static_cast<double>(fan_in == 0 ? 1 : fan_in));
    std::vector<T> v(numel(shape));
    for (auto& x : v) x = static_cast<T>(rng.uniform(-bound, bound));
    return Tensor<T>::parameter(std::move(shape), std::move(v));
}

template <class T>
AdamState<T> adam_init(const ParamList<T>& params) {
    AdamState<T> s;
    for (const auto& p : params) {
        s.m.emplace_back(p.tensor.size(), T(0));
        s.v.emplace_back(p.tensor.size(), T(0));
    }
    return s;
}

template <class T>
void adam_step(ParamList<T>& params, AdamState<T>& state, const AdamConfig& cfg) {
    if (state.m.size() != params.size()) throw RuntimeError("adam: optimizer state does not match parameters");
    for (const auto& p : params) {
        if (!p.tensor.has_grad()) continue;
        for (T g : p.tensor.grad())
            if (!std::isfinite(static_cast<double>(g))) throw RuntimeError("adam: non-finite gradient in " + p.name);
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto& t = params[i].tensor;
        if (!t.has_grad()) continue;
        auto w = t.mutable_values();
        const auto g = t.grad();
        auto& m = state.m[i];
        auto& v = state.v[i];
        for (std::size_t j = 0; j < w.size(); ++j) {
            m[j] = T(cfg.beta1) * m[j] + T(1.0 - cfg.beta1) * g[j];
            v[j] = T(cfg.beta2) * v[j] + T(1.0 - cfg.beta2) * g[j] * g[j];
            const double mhat = double(m[j]) / c1;
            const double vhat = double(v[j]) / c2;
            w[j] -= static_cast<T>(cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
        }
    }
}

#define PEDX_INSTANTIATE_OPTIM(T)                                         \
    template std::size_t parameter_count(const ParamList<T>&);            \
    template void zero_grads(ParamList<T>&);                              \
    template Tensor<T> init_uniform(Shape, std::size_t, Rng&, double);    \
    template AdamState<T> adam_init(const ParamList<T>&);                 \
    template void adam_step(ParamList<T>&, AdamState<T>&, const AdamConfig&);

PEDX_INSTANTIATE_OPTIM(float)
PEDX_INSTANTIATE_OPTIM(double)

}  // namespace pedx::nn
