// SPDX-License-Identifier: Apache-2.0

#include "lamm/training/optimizer.hpp"

#include <cmath>
#include <numbers>

#include "lamm/errors.hpp"

namespace lamm {

double cosine_lr(double base_lr, std::size_t step, std::size_t total_steps) {
    if (total_steps == 0) throw UsageError("cosine_lr: total_steps must be positive");
    const double frac = static_cast<double>(step) / static_cast<double>(total_steps);
    return base_lr * (1.0 + std::cos(std::numbers::pi * frac)) / 2.0;
}

void momentum_step(std::span<double> params, std::span<const double> grads, std::span<double> velocity, double lr,
                   double momentum) {
    if (params.size() != grads.size() || params.size() != velocity.size()) {
        throw UsageError("momentum_step: parameter, gradient and velocity sizes differ");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = momentum * velocity[i] + grads[i];
        params[i] -= lr * velocity[i];
    }
}

}  // namespace lamm
