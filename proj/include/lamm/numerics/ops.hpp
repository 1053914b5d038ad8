// SPDX-License-Identifier: Apache-2.0
//
// Differentiable primitives. Every function records one node on the tape of
// its inputs; inputs must share a tape. Rank-2 operands are [rows x cols];
// vectors may be given as [n] or [1 x n].

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lamm/numerics/tape.hpp"

namespace lamm::num {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
/// a [m x n] + b broadcast over rows, b of shape [n] or [1 x n].
Var add_row(Var a, Var b);
Var scale(Var a, double s);
Var add_scalar(Var a, double s);

Var matmul(Var a, Var b);
Var transpose(Var a);

/// Row-wise LayerNorm with affine gain and bias of shape [n].
Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);
/// Exact (erf) GELU.
Var gelu(Var x);

/// Bidirectional scaled dot-product attention over n_heads equal column
/// groups. q, k, v: [T x d]; returns [T x d].
Var attention(Var q, Var k, Var v, std::size_t n_heads);

/// Each row divided by its L2 norm. Zero rows are a domain error.
Var l2_normalize_rows(Var x);
/// Scalar cosine similarity of two equally sized tensors (flattened).
Var cosine_sim(Var a, Var b);

/// Row-wise softmax of x / tau.
Var softmax_rows(Var x, double tau = 1.0);
/// Row-wise log-softmax of x / tau, computed stably.
Var log_softmax_rows(Var x, double tau = 1.0);
/// Natural log; non-positive entries are a domain error.
Var log(Var x);
Var square(Var x);
Var sum(Var x);
Var mean(Var x);

/// Row r of a rank-2 tensor as [1 x n].
Var row(Var x, std::size_t r);
/// Rows [begin, begin + count) of x.
Var slice_rows(Var x, std::size_t begin, std::size_t count);
/// Concatenate along rows; every part must have the same column count.
Var stack_rows(std::span<const Var> parts);
/// out[i] = x[i, index[i]]; returns shape [m].
Var pick(Var x, std::span<const std::size_t> index);

// Plain (non-recording) helpers shared with the evaluation path.
std::vector<double> softmax(std::span<const double> logits, double tau);
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace lamm::num
