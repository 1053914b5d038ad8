// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "lamm/errors.hpp"
#include "lamm/losses/losses.hpp"
#include "lamm/numerics/grad_check.hpp"
#include "lamm/numerics/ops.hpp"
#include "lamm/training/optimizer.hpp"

using namespace lamm;
using lamm::testing::random_tensor;

TEST(PredictProbs, Examples) {
    EXPECT_DOUBLE_EQ(predict_probs(std::vector<double>{0.7}, 0.01)[0], 1.0);
    auto p = predict_probs(std::vector<double>{0.2, 0.2}, 0.01);
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    p = predict_probs(std::vector<double>{0.3, 0.1}, 0.1);
    EXPECT_NEAR(p[0], 0.8808, 1e-4);
    EXPECT_NEAR(p[1], 0.1192, 1e-4);
    EXPECT_THROW(predict_probs(std::vector<double>{0.3, 0.1}, 0.0), DomainError);
}

TEST(CeLoss, Examples) {
    num::Tape t;
    std::vector<std::size_t> label0{0};
    auto ce = ce_loss(t.constant(num::Tensor::matrix(1, 2, {0.3, 0.1})), label0, 0.1);
    EXPECT_NEAR(ce.value().item(), -std::log(0.8808), 1e-3);

    std::vector<std::size_t> labels{2, 0};
    auto uniform = ce_loss(t.constant(num::Tensor::matrix(2, 4, {0.1, 0.1, 0.1, 0.1, -0.4, -0.4, -0.4, -0.4})), labels, 0.5);
    EXPECT_NEAR(uniform.value().item(), std::log(4.0), 1e-6);

    auto certain = ce_loss(t.constant(num::Tensor::matrix(1, 2, {1.0, -1.0})), label0, 1e-4);
    EXPECT_NEAR(certain.value().item(), 0.0, 1e-12);
}

TEST(CeLoss, InvalidLabelIsUsageError) {
    num::Tape t;
    std::vector<std::size_t> bad{2};
    EXPECT_THROW(ce_loss(t.constant(num::Tensor::matrix(1, 2, {0.3, 0.1})), bad, 0.1), UsageError);
}

TEST(WcLoss, Examples) {
    num::Tape t;
    auto check = [&](std::vector<double> theta, std::vector<double> ref) {
        num::Tensor r = num::Tensor::vector(ref);
        std::vector<num::Var> params{t.leaf(num::Tensor::vector(theta))};
        std::vector<const num::Tensor*> refs{&r};
        return wc_loss(t, params, refs).value().item();
    };
    EXPECT_EQ(check({0.4, -0.2}, {0.4, -0.2}), 0.0);
    EXPECT_DOUBLE_EQ(check({1, 2}, {0, 0}), 5.0);
    EXPECT_DOUBLE_EQ(check({1}, {3}), 4.0);
}

TEST(CosLoss, Examples) {
    num::Tensor one = num::Tensor::matrix(1, 2, {1, 0});
    num::Tensor orth = num::Tensor::matrix(1, 2, {0, 1});
    EXPECT_NEAR(cos_loss(one, orth), 1.0, 1e-15);
    auto student = num::Tensor::matrix(2, 2, {1, 0, 0, 1});
    auto teacher = num::Tensor::matrix(2, 2, {3, 0, 0, -2});
    EXPECT_NEAR(cos_loss(student, teacher), 2.0, 1e-15);
    num::Tape t;
    EXPECT_NEAR(cos_loss(t.constant(student), teacher).value().item(), 2.0, 1e-15);
    auto x = random_tensor({3, 5}, 2);
    EXPECT_EQ(cos_loss(x, x), 0.0);
}

TEST(KdLoss, Examples) {
    EXPECT_EQ(kd_loss_literal(std::vector<double>{1.0}, std::vector<double>{1.0}, 1), 0.0);
    EXPECT_NEAR(kd_loss_literal(std::vector<double>{0.5}, std::vector<double>{0.5}, 1), 0.5 * std::log(2.0), 1e-6);
    // Teacher at or below the floor is clamped: no log-domain failure.
    EXPECT_NEAR(kd_loss_literal(std::vector<double>{0.5}, std::vector<double>{-0.3}, 1), -0.5 * std::log(kKdClampFloor),
                1e-12);
    num::Tape t;
    auto v = kd_loss(t.constant(num::Tensor::matrix(1, 1, {0.5})), num::Tensor::matrix(1, 1, {0.5}), KdMode::literal, 0.01);
    EXPECT_NEAR(v.value().item(), 0.5 * std::log(2.0), 1e-6);
}

TEST(KdLoss, LiteralGradientInsideClampRegion) {
    auto teacher = num::Tensor::matrix(2, 3, {0.3, 0.5, 0.2, 0.6, 0.25, 0.4});
    auto fn = [&](num::Tape&, num::Var s) { return kd_loss(s, teacher, KdMode::literal, 0.01); };
    EXPECT_LE(num::grad_check(fn, random_tensor({2, 3}, 3, 0.3)), 1e-4);
}

TEST(KdLoss, SwappedGradient) {
    auto teacher = random_tensor({2, 3}, 8, 0.3);
    auto fn = [&](num::Tape&, num::Var s) { return kd_loss(s, teacher, KdMode::swapped, 0.5); };
    EXPECT_LE(num::grad_check(fn, random_tensor({2, 3}, 3, 0.3)), 1e-4);
}

TEST(KdMode, ParseRoundTrip) {
    EXPECT_EQ(parse_kd_mode(to_string(KdMode::swapped)), KdMode::swapped);
    EXPECT_EQ(parse_kd_mode("literal"), KdMode::literal);
    EXPECT_THROW(parse_kd_mode("soft"), UsageError);
}

TEST(LossWeights, Defaults) {
    EXPECT_DOUBLE_EQ(LossWeights::defaults(16).lambda1, 0.0625);
    EXPECT_DOUBLE_EQ(LossWeights::defaults(1).lambda1, 1.0);
    EXPECT_DOUBLE_EQ(LossWeights::defaults(4).lambda2, 1.0);
    EXPECT_DOUBLE_EQ(LossWeights::defaults(4).lambda3, 0.05);
}

TEST(LossWeights, NegativeOverrideIsConfigError) {
    EXPECT_THROW(LossWeights::with_overrides(4, -1.0, std::nullopt, std::nullopt), ConfigError);
    EXPECT_THROW(LossWeights::with_overrides(4, std::nullopt, std::nullopt, -0.1), ConfigError);
    auto w = LossWeights::with_overrides(4, std::nullopt, 0.0, std::nullopt);
    EXPECT_DOUBLE_EQ(w.lambda1, 0.25);
    EXPECT_DOUBLE_EQ(w.lambda2, 0.0);
}

TEST(TotalLoss, ZeroWeightsGiveCe) {
    num::Tape t;
    auto ce = t.constant(num::Tensor::scalar(0.7));
    auto wc = t.constant(num::Tensor::scalar(2.0));
    auto cs = t.constant(num::Tensor::scalar(3.0));
    auto kd = t.constant(num::Tensor::scalar(4.0));
    auto zero = LossWeights::with_overrides(2, 0.0, 0.0, 0.0);
    auto r = total_loss(ce, wc, cs, kd, zero);
    EXPECT_EQ(r.total.value().item(), 0.7);
    auto full = total_loss(ce, wc, cs, kd, LossWeights::defaults(2));
    EXPECT_DOUBLE_EQ(full.breakdown.total, 0.7 + 0.5 * 2.0 + 3.0 + 0.05 * 4.0);
    EXPECT_EQ(full.breakdown.total, full.total.value().item());
    EXPECT_TRUE(full.breakdown.all_finite());
}

TEST(LossBreakdown, NamesNonFiniteTerms) {
    LossBreakdown b;
    b.cos = NAN;
    b.total = INFINITY;
    EXPECT_FALSE(b.all_finite());
    EXPECT_EQ(b.non_finite_terms(), "cos, total");
}

TEST(Optimizer, PlainStep) {
    std::vector<double> theta{2.0}, v{0.0};
    momentum_step(theta, std::vector<double>{1.0}, v, 1.0, 0.0);
    EXPECT_DOUBLE_EQ(theta[0], 1.0);
}

TEST(Optimizer, ZeroGradientZeroVelocityIsNoOp) {
    std::vector<double> theta{2.0, -1.0}, v{0.0, 0.0};
    momentum_step(theta, std::vector<double>{0.0, 0.0}, v, 0.5, 0.9);
    EXPECT_EQ(theta, (std::vector<double>{2.0, -1.0}));
}

TEST(Optimizer, MomentumAccumulates) {
    std::vector<double> theta{0.0}, v{0.0};
    momentum_step(theta, std::vector<double>{1.0}, v, 1.0, 0.9);
    momentum_step(theta, std::vector<double>{1.0}, v, 1.0, 0.9);
    EXPECT_DOUBLE_EQ(theta[0], -2.9);
    EXPECT_DOUBLE_EQ(v[0], 1.9);
}

TEST(Optimizer, CosineSchedule) {
    EXPECT_DOUBLE_EQ(cosine_lr(0.1, 0, 10), 0.1);
    EXPECT_NEAR(cosine_lr(0.1, 5, 10), 0.05, 1e-15);
    EXPECT_GT(cosine_lr(0.1, 9, 10), 0.0);
    EXPECT_THROW(cosine_lr(0.1, 0, 0), UsageError);
}
