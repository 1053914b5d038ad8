// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>

#include "lamm/numerics/tensor.hpp"

namespace lamm::num {

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
struct Var {
    Tape* tape = nullptr;
    std::size_t id = 0;

    bool valid() const noexcept { return tape != nullptr; }
    const Tensor& value() const;
    const Shape& shape() const { return value().shape(); }
};

/// Records primitive applications in order and replays them in reverse to
/// accumulate gradients. One tape per computation graph; not thread-safe.
class Tape {
public:
    using BackwardFn = std::function<void(Tape&, Var self, std::span<const double> out_grad)>;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Leaf owned by the tape; differentiable when value.requires_grad().
    Var leaf(Tensor value);
    Var constant(Tensor value);
    /// Constant that aliases caller-owned storage. The tensor must outlive the tape.
    Var constant_ref(const Tensor& value);

    /// Used by primitives: store an output and its backward closure.
    Var record(Tensor value, bool needs_grad, BackwardFn backward);

    const Tensor& value(Var v) const;
    bool needs_grad(Var v) const;

    /// Gradient of the last backward() w.r.t. v (accumulated for leaves).
    /// Returns zeros when v received no gradient.
    Tensor grad(Var v) const;

    /// Adds g into v's gradient buffer; no-op for values that do not need grad.
    void accumulate(Var v, std::span<const double> g);

    /// Reverse-mode sweep from a scalar output. Leaf gradients accumulate
    /// across calls until zero_grad().
    void backward(Var output);
    void zero_grad();

    std::size_t size() const noexcept { return nodes_.size(); }

private:
    struct Node {
        Tensor owned;
        const Tensor* ref = nullptr;
        bool is_leaf = false;
        bool needs_grad = false;
        BackwardFn backward;

        const Tensor& value() const { return ref ? *ref : owned; }
    };

    Node& node(Var v);
    const Node& node(Var v) const;

    // deque keeps references to earlier values stable while recording.
    std::deque<Node> nodes_;
};

}  // namespace lamm::num
