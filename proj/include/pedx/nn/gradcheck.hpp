#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pedx/nn/tensor.hpp"

namespace pedx::nn {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_input = 0;
    std::size_t worst_index = 0;
    double analytic = 0.0;
    double numeric = 0.0;
};

using ScalarFn = std::function<Tensor<double>(const std::vector<Tensor<double>>&)>;

// Compares reverse-mode gradients of `fn` (which must return a single value)
// against central differences for every coordinate of every input.
// Relative error is |a - n| / max(|a|, |n|, 1e-8).
GradCheckResult grad_check(const ScalarFn& fn, std::vector<Tensor<double>> inputs, double eps = 1e-5);

// Same check over tensors that `fn` already closes over (model parameters or
// inputs wrapped as parameters). Values are perturbed in place and restored.
GradCheckResult grad_check_params(const std::function<Tensor<double>()>& fn, std::vector<Tensor<double>> params,
                                  double eps = 1e-5);

// Reduces any tensor to a scalar through a fixed pseudo-random weighting so
// that every output coordinate contributes a distinct gradient.
Tensor<double> random_projection(const Tensor<double>& out, std::uint64_t seed = 1234);

}  // namespace pedx::nn
