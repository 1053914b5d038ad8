// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "lamm/numerics/tape.hpp"

namespace lamm::num {

/// Scalar function of one tensor, expressed on a tape.
using ScalarFn = std::function<Var(Tape&, Var x)>;

/// Central-difference gradient check.
///
/// Returns max_i |analytic_i - numeric_i| / max(1e-8, |numeric_i|) where
/// numeric_i = (f(x + eps e_i) - f(x - eps e_i)) / (2 eps). Every evaluation
/// runs on a fresh tape. A non-finite function value raises NumericError.
double grad_check(const ScalarFn& fn, const Tensor& x, double eps = 1e-5);

/// Analytic gradient of fn at x (single backward pass).
Tensor analytic_grad(const ScalarFn& fn, const Tensor& x);

}  // namespace lamm::num
