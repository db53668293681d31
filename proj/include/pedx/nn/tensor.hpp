#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pedx/error.hpp"

namespace pedx::nn {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape) noexcept;
std::string to_string(const Shape& shape);

template <class T>
struct Node {
    Shape shape;
    std::vector<T> value;
    std::vector<T> grad;  // empty until something flows into it
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Reads this->grad and accumulates into parents' grads.
    std::function<void(Node&)> backward;

    std::vector<T>& grad_buffer() {
        if (grad.size() != value.size()) grad.assign(value.size(), T(0));
        return grad;
    }
};

// Reference-counted handle onto a graph node. Copies alias the same node.
template <class T>
class Tensor {
public:
    using value_type = T;

    Tensor() = default;
    explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

    static Tensor constant(Shape shape, std::vector<T> values);
    static Tensor zeros(Shape shape);
    // Leaf that accumulates gradients across backward passes.
    static Tensor parameter(Shape shape, std::vector<T> values);

    bool defined() const noexcept { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t size() const { return node_->value.size(); }
    bool requires_grad() const { return node_ && node_->requires_grad; }

    std::span<const T> values() const { return node_->value; }
    std::span<T> mutable_values() { return node_->value; }
    std::span<const T> grad() const { return node_->grad; }
    std::span<T> mutable_grad() { return node_->grad_buffer(); }
    bool has_grad() const { return node_->grad.size() == node_->value.size(); }
    void zero_grad() { node_->grad.clear(); }
    T item() const;

    const std::shared_ptr<Node<T>>& node() const { return node_; }

private:
    std::shared_ptr<Node<T>> node_;
};

// Disables graph construction on the current thread while alive. Ops then
// produce constant tensors, which keeps inference allocation-light.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

bool grad_enabled() noexcept;

// Builds an op result node; records parents and the backward closure only when
// some parent requires grad and grad mode is on.
template <class T>
Tensor<T> make_result(Shape shape, std::vector<T> values, std::vector<std::shared_ptr<Node<T>>> parents,
                      std::function<void(Node<T>&)> backward);

// Seeds d(out)/d(out) = 1 (out must be a single value) and runs the graph in
// reverse topological order. Parameter leaves accumulate.
template <class T>
void backward(const Tensor<T>& out);

template <class T, class U>
Tensor<T> cast(const Tensor<U>& src, bool as_parameter);

}  // namespace pedx::nn
