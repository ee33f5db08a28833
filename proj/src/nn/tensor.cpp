#include "tumorgnn/nn/tensor.hpp"

#include <algorithm>
#include <stdexcept>

namespace tumorgnn::nn {

Parameter& ParameterStore::add(std::string name, std::size_t rows, std::size_t cols) {
    if (contains(name)) throw std::invalid_argument("duplicate parameter name: " + name);
    auto p = std::make_unique<Parameter>();
    p->name = std::move(name);
    p->value = Matrix(rows, cols);
    p->grad = Matrix(rows, cols);
    params_.push_back(std::move(p));
    return *params_.back();
}

Parameter& ParameterStore::get(const std::string& name) {
    for (auto& p : params_)
        if (p->name == name) return *p;
    throw std::out_of_range("no parameter named " + name);
}

const Parameter& ParameterStore::get(const std::string& name) const {
    for (const auto& p : params_)
        if (p->name == name) return *p;
    throw std::out_of_range("no parameter named " + name);
}

bool ParameterStore::contains(const std::string& name) const {
    return std::any_of(params_.begin(), params_.end(), [&](const auto& p) { return p->name == name; });
}

std::size_t ParameterStore::scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p->value.size();
    return n;
}

void ParameterStore::zero_grad() {
    for (auto& p : params_) p->grad.zero();
}

std::vector<Matrix> ParameterStore::snapshot() const {
    std::vector<Matrix> out;
    out.reserve(params_.size());
    for (const auto& p : params_) out.push_back(p->value);
    return out;
}

void ParameterStore::restore(const std::vector<Matrix>& values) {
    if (values.size() != params_.size()) throw std::invalid_argument("restore: parameter count mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!values[i].same_shape(params_[i]->value)) throw std::invalid_argument("restore: shape mismatch");
        params_[i]->value = values[i];
    }
}

Var Tape::constant(Matrix m) {
    nodes_.push_back(Node{std::move(m), {}, nullptr, false});
    return Var{this, nodes_.size() - 1};
}

Var Tape::parameter(Parameter& p) {
    nodes_.push_back(Node{p.value, {}, &p, true});
    return Var{this, nodes_.size() - 1};
}

Var Tape::record(Matrix value, BackwardFn fn) {
    nodes_.push_back(Node{std::move(value), {}, nullptr, true});
    std::size_t id = nodes_.size() - 1;
    backs_.emplace_back(id, std::move(fn));
    return Var{this, id};
}

Matrix& Tape::grad(Var v) {
    Node& n = nodes_[v.id];
    if (!n.grad.same_shape(n.value)) n.grad = Matrix(n.value.rows, n.value.cols);
    return n.grad;
}

void Tape::backward(Var loss) {
    if (consumed_) throw std::logic_error("backward called twice on the same tape; run forward again");
    if (value(loss).size() != 1) throw std::invalid_argument("backward: loss must be a 1x1 value");
    consumed_ = true;
    grad(loss).data[0] = 1.0;
    for (auto it = backs_.rbegin(); it != backs_.rend(); ++it) {
        Node& n = nodes_[it->first];
        if (!n.grad.same_shape(n.value)) continue;  // nothing flowed into this node
        it->second(*this, Var{this, it->first});
    }
    for (Node& n : nodes_) {
        if (!n.param || !n.grad.same_shape(n.value)) continue;
        auto& g = n.param->grad.data;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad.data[i];
    }
}

}  // namespace tumorgnn::nn
