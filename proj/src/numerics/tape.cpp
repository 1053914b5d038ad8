// SPDX-License-Identifier: Apache-2.0

#include "lamm/numerics/tape.hpp"

#include "lamm/errors.hpp"

namespace lamm::num {

const Tensor& Var::value() const {
    if (!tape) throw UsageError("value() on an empty Var");
    return tape->value(*this);
}

Var Tape::leaf(Tensor value) {
    Node n;
    n.needs_grad = value.requires_grad();
    n.is_leaf = true;
    n.owned = std::move(value);
    nodes_.push_back(std::move(n));
    return Var{this, nodes_.size() - 1};
}

Var Tape::constant(Tensor value) {
    value.set_requires_grad(false);
    value.clear_grad();
    Node n;
    n.owned = std::move(value);
    n.is_leaf = true;
    nodes_.push_back(std::move(n));
    return Var{this, nodes_.size() - 1};
}

Var Tape::constant_ref(const Tensor& value) {
    Node n;
    n.ref = &value;
    n.is_leaf = true;
    nodes_.push_back(std::move(n));
    return Var{this, nodes_.size() - 1};
}

Var Tape::record(Tensor value, bool needs_grad, BackwardFn backward) {
    Node n;
    n.owned = std::move(value);
    n.needs_grad = needs_grad;
    if (needs_grad) n.backward = std::move(backward);
    nodes_.push_back(std::move(n));
    return Var{this, nodes_.size() - 1};
}

Tape::Node& Tape::node(Var v) {
    if (v.tape != this || v.id >= nodes_.size()) throw UsageError("Var does not belong to this tape");
    return nodes_[v.id];
}

const Tape::Node& Tape::node(Var v) const {
    if (v.tape != this || v.id >= nodes_.size()) throw UsageError("Var does not belong to this tape");
    return nodes_[v.id];
}

const Tensor& Tape::value(Var v) const {
    return node(v).value();
}

bool Tape::needs_grad(Var v) const {
    return node(v).needs_grad;
}

Tensor Tape::grad(Var v) const {
    const auto& n = node(v);
    const auto& t = n.value();
    Tensor g(t.shape());
    if (!n.ref && n.owned.has_grad()) {
        auto src = n.owned.grad();
        std::copy(src.begin(), src.end(), g.data().begin());
    }
    return g;
}

void Tape::accumulate(Var v, std::span<const double> g) {
    auto& n = node(v);
    if (!n.needs_grad) return;
    auto dst = n.owned.mutable_grad();
    if (dst.size() != g.size()) throw UsageError("gradient size mismatch on accumulate");
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
}

void Tape::backward(Var output) {
    const auto& out = node(output);
    if (out.value().size() != 1) {
        throw UsageError("backward() needs a scalar output, got shape " + shape_str(out.value().shape()));
    }
    for (auto& n : nodes_)
        if (!n.is_leaf) n.owned.clear_grad();
    if (!out.needs_grad) return;

    const double one = 1.0;
    accumulate(output, std::span<const double>(&one, 1));
    for (std::size_t i = output.id + 1; i-- > 0;) {
        auto& n = nodes_[i];
        if (!n.backward || !n.owned.has_grad()) continue;
        n.backward(*this, Var{this, i}, n.owned.grad());
    }
}

void Tape::zero_grad() {
    for (auto& n : nodes_)
        if (!n.ref) n.owned.clear_grad();
}

}  // namespace lamm::num
