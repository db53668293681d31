#include "pedx/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "pedx/nn/ops.hpp"
#include "pedx/rng.hpp"

namespace pedx::nn {

GradCheckResult grad_check(const ScalarFn& fn, std::vector<Tensor<double>> inputs, double eps) {
    std::vector<Tensor<double>> params;
    params.reserve(inputs.size());
    for (const auto& in : inputs) params.push_back(cast<double>(in, true));
    return grad_check_params([&] { return fn(params); }, params, eps);
}

GradCheckResult grad_check_params(const std::function<Tensor<double>()>& fn, std::vector<Tensor<double>> params,
                                  double eps) {
    for (auto& p : params) p.zero_grad();
    auto out = fn();
    backward(out);
    std::vector<std::vector<double>> analytic;
    for (auto& p : params)
        analytic.emplace_back(p.has_grad() ? std::vector<double>(p.grad().begin(), p.grad().end())
                                           : std::vector<double>(p.size(), 0.0));

    GradCheckResult res;
    NoGradGuard no_grad;
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto vals = params[i].mutable_values();
        for (std::size_t j = 0; j < vals.size(); ++j) {
            const double orig = vals[j];
            vals[j] = orig + eps;
            const double fp = fn().item();
            vals[j] = orig - eps;
            const double fm = fn().item();
            vals[j] = orig;
            const double num = (fp - fm) / (2 * eps);
            const double a = analytic[i][j];
            const double rel = std::abs(a - num) / std::max({std::abs(a), std::abs(num), 1e-8});
            if (rel > res.max_rel_error) res = {rel, i, j, a, num};
        }
    }
    return res;
}

Tensor<double> random_projection(const Tensor<double>& out, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> w(out.size());
    for (auto& v : w) v = rng.uniform(-1.0, 1.0);
    auto flat = reshape(out, {1, out.size()});
    return linear(flat, Tensor<double>::constant({out.size(), 1}, std::move(w)), Tensor<double>());
}

}  // namespace pedx::nn
