// SPDX-License-Identifier: Apache-2.0

#include "lamm/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "lamm/errors.hpp"

namespace lamm::num {

namespace {

double evaluate(const ScalarFn& fn, const Tensor& x) {
    Tape tape;
    Tensor input(x.shape(), std::vector<double>(x.data().begin(), x.data().end()));
    auto out = fn(tape, tape.constant(std::move(input)));
    const double v = out.value().item();
    if (!std::isfinite(v)) throw NumericError("grad_check: function value is not finite");
    return v;
}

}  // namespace

Tensor analytic_grad(const ScalarFn& fn, const Tensor& x) {
    if (x.size() == 0) throw UsageError("gradient of an empty tensor");
    Tape tape;
    Tensor input(x.shape(), std::vector<double>(x.data().begin(), x.data().end()));
    input.set_requires_grad(true);
    auto leaf = tape.leaf(std::move(input));
    auto out = fn(tape, leaf);
    if (!std::isfinite(out.value().item())) throw NumericError("grad_check: function value is not finite");
    tape.backward(out);
    return tape.grad(leaf);
}

double grad_check(const ScalarFn& fn, const Tensor& x, double eps) {
    if (!(eps > 0.0)) throw UsageError("grad_check: eps must be positive");
    const auto analytic = analytic_grad(fn, x);
    double worst = 0.0;
    Tensor probe(x.shape(), std::vector<double>(x.data().begin(), x.data().end()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double orig = probe[i];
        probe[i] = orig + eps;
        const double up = evaluate(fn, probe);
        probe[i] = orig - eps;
        const double down = evaluate(fn, probe);
        probe[i] = orig;
        const double numeric = (up - down) / (2.0 * eps);
        const double err = std::abs(analytic[i] - numeric) / std::max(1e-8, std::abs(numeric));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace lamm::num
