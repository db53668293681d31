#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pedx/nn/tensor.hpp"
#include "pedx/rng.hpp"

namespace pedx::nn {

template <class T>
struct NamedParam {
    std::string name;
    Tensor<T> tensor;
};

template <class T>
using ParamList = std::vector<NamedParam<T>>;

template <class T>
std::size_t parameter_count(const ParamList<T>& params);

template <class T>
void zero_grads(ParamList<T>& params);

// Fan-in scaled uniform U(-g/sqrt(fan_in), g/sqrt(fan_in)); g = sqrt(6) keeps
// activation variance through ReLU layers.
template <class T>
Tensor<T> init_uniform(Shape shape, std::size_t fan_in, Rng& rng, double gain = 1.0);

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

template <class T>
struct AdamState {
    std::vector<std::vector<T>> m;
    std::vector<std::vector<T>> v;
    std::uint64_t step = 0;
};

template <class T>
AdamState<T> adam_init(const ParamList<T>& params);

// One bias-corrected Adam update from the gradients stored on `params`.
// A parameter that received no gradient is left untouched, moments included.
// Throws RuntimeError naming the parameter if a gradient is not finite; no
// parameter is modified in that case.
template <class T>
void adam_step(ParamList<T>& params, AdamState<T>& state, const AdamConfig& cfg);

}  // namespace pedx::nn
