// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

namespace lamm {

/// lr * (1 + cos(pi * step / total_steps)) / 2, for step in [0, total_steps).
double cosine_lr(double base_lr, std::size_t step, std::size_t total_steps);

/// Classic momentum: v <- momentum * v + g; param <- param - lr * v.
void momentum_step(std::span<double> params, std::span<const double> grads, std::span<double> velocity, double lr,
                   double momentum);

}  // namespace lamm
