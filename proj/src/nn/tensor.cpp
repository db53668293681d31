#include "pedx/nn/tensor.hpp"

#include <unordered_set>

namespace pedx::nn {

namespace {
thread_local bool t_grad_enabled = true;
}

std::size_t numel(const Shape& shape) noexcept {
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    return n;
}

std::string to_string(const Shape& shape) {
    std::string s = "(";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + ")";
}

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }
bool grad_enabled() noexcept { return t_grad_enabled; }

template <class T>
Tensor<T> Tensor<T>::constant(Shape shape, std::vector<T> values) {
    if (numel(shape) != values.size())
        throw ShapeError("constant " + to_string(shape) + " given " + std::to_string(values.size()) + " values");
    auto node = std::make_shared<Node<T>>();
    node->shape = std::move(shape);
    node->value = std::move(values);
    return Tensor(std::move(node));
}

template <class T>
Tensor<T> Tensor<T>::zeros(Shape shape) {
    std::vector<T> v(numel(shape), T(0));
    return constant(std::move(shape), std::move(v));
}

template <class T>
Tensor<T> Tensor<T>::parameter(Shape shape, std::vector<T> values) {
    auto t = constant(std::move(shape), std::move(values));
    t.node()->requires_grad = true;
    return t;
}

template <class T>
T Tensor<T>::item() const {
    if (node_->value.size() != 1) throw ShapeError("item() on tensor " + to_string(node_->shape));
    return node_->value[0];
}

template <class T>
Tensor<T> make_result(Shape shape, std::vector<T> values, std::vector<std::shared_ptr<Node<T>>> parents,
                      std::function<void(Node<T>&)> backward) {
    auto node = std::make_shared<Node<T>>();
    node->shape = std::move(shape);
    node->value = std::move(values);
    if (t_grad_enabled) {
        bool any = false;
        for (const auto& p : parents) any = any || (p && p->requires_grad);
        if (any) {
            node->requires_grad = true;
            node->parents = std::move(parents);
            node->backward = std::move(backward);
        }
    }
    return Tensor<T>(std::move(node));
}

template <class T>
void backward(const Tensor<T>& out) {
    if (out.size() != 1) throw ShapeError("backward() needs a scalar, got " + to_string(out.shape()));
    if (!out.requires_grad()) return;

    // Iterative post-order DFS gives a topological order.
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> seen;
    std::vector<std::pair<Node<T>*, std::size_t>> stack{{out.node().get(), 0}};
    seen.insert(out.node().get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node<T>* p = node->parents[next++].get();
            if (p && p->requires_grad && !seen.count(p)) {
                seen.insert(p);
                stack.push_back({p, 0});
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    out.node()->grad_buffer()[0] += T(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node<T>* n = *it;
        if (n->backward && n->grad.size() == n->value.size()) n->backward(*n);
    }
    // Free interior gradients; parameter leaves keep theirs.
    for (Node<T>* n : order)
        if (n->backward) std::vector<T>().swap(n->grad);
}

template <class T, class U>
Tensor<T> cast(const Tensor<U>& src, bool as_parameter) {
    std::vector<T> v(src.values().begin(), src.values().end());
    return as_parameter ? Tensor<T>::parameter(src.shape(), std::move(v)) : Tensor<T>::constant(src.shape(), std::move(v));
}

template class Tensor<float>;
template class Tensor<double>;
template Tensor<float> make_result(Shape, std::vector<float>, std::vector<std::shared_ptr<Node<float>>>,
                                   std::function<void(Node<float>&)>);
template Tensor<double> make_result(Shape, std::vector<double>, std::vector<std::shared_ptr<Node<double>>>,
                                    std::function<void(Node<double>&)>);
template void backward(const Tensor<float>&);
template void backward(const Tensor<double>&);
template Tensor<double> cast(const Tensor<float>&, bool);
template Tensor<float> cast(const Tensor<double>&, bool);
template Tensor<float> cast(const Tensor<float>&, bool);
template Tensor<double> cast(const Tensor<double>&, bool);

}  // namespace pedx::nn
