// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "lamm/errors.hpp"
#include "lamm/numerics/grad_check.hpp"
#include "lamm/numerics/ops.hpp"

using namespace lamm;
using namespace lamm::num;
using lamm::testing::random_tensor;

namespace {

// Scalar projection <w, v> with fixed random weights, so every output
// coordinate contributes to the checked gradient.
Var project(Tape& tape, Var v, std::uint64_t seed) {
    auto w = tape.constant(random_tensor(v.shape(), seed ^ 0xabcdefULL));
    return sum(mul(v, w));
}

double check(const ScalarFn& fn, const Tensor& x) { return grad_check(fn, x, 1e-5); }

Tensor positive(Tensor t) {
    for (auto& v : t.data()) v = std::abs(v) + 0.5;
    return t;
}

}  // namespace

TEST(Tensor, ShapeMustMatchData) {
    EXPECT_THROW(Tensor({2, 3}, std::vector<double>(5)), UsageError);
    Tensor t({2, 3}, 1.5);
    EXPECT_EQ(t.size(), 6u);
    EXPECT_EQ(t.rows(), 2u);
    EXPECT_EQ(t.cols(), 3u);
}

TEST(Tensor, GradBufferMatchesShape) {
    Tensor t({3, 2});
    EXPECT_FALSE(t.has_grad());
    EXPECT_EQ(t.mutable_grad().size(), t.size());
    EXPECT_TRUE(t.has_grad());
}

TEST(Tensor, ContentHashIsStableAndSensitive) {
    auto a = random_tensor({4, 4}, 5);
    auto b = a;
    EXPECT_EQ(content_hash(a), content_hash(b));
    b[7] = std::nextafter(b[7], 1e9);
    EXPECT_NE(content_hash(a), content_hash(b));
    EXPECT_NE(content_hash(a), content_hash(a.reshaped({2, 8})));
}

TEST(CosineSim, Examples) {
    EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 0, 0}, std::vector<double>{1, 0, 0}), 1.0);
    EXPECT_DOUBLE_EQ(cosine(std::vector<double>{1, 0}, std::vector<double>{0, 1}), 0.0);
    EXPECT_NEAR(cosine(std::vector<double>{1, 2}, std::vector<double>{2, 1}), 0.8, 1e-15);

    Tape tape;
    auto c = cosine_sim(tape.constant(Tensor::vector({1, 2})), tape.constant(Tensor::vector({2, 1})));
    EXPECT_NEAR(c.value().item(), 0.8, 1e-15);
}

TEST(CosineSim, ZeroNormIsDomainError) {
    Tape tape;
    auto z = tape.constant(Tensor::vector({0, 0}));
    auto a = tape.constant(Tensor::vector({1, 0}));
    try {
        cosine_sim(a, z);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("second operand"), std::string::npos);
    }
    EXPECT_THROW(cosine_sim(z, a), DomainError);
}

TEST(CosineSim, ScaleInvariant) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto a = random_tensor({6}, seed);
        auto b = random_tensor({6}, seed + 100);
        const double base = cosine(a.data(), b.data());
        for (double alpha : {0.001, 0.5, 3.0, 1e4}) {
            auto sa = a;
            auto sb = b;
            for (auto& v : sa.data()) v *= alpha;
            for (auto& v : sb.data()) v *= 1.0 / (alpha + 1.0);
            EXPECT_NEAR(cosine(sa.data(), sb.data()), base, 1e-12);
        }
    }
}

TEST(Softmax, Examples) {
    auto p = softmax(std::vector<double>{0.2, 0.2}, 0.5);
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
    EXPECT_DOUBLE_EQ(softmax(std::vector<double>{0.3}, 0.01)[0], 1.0);
    p = softmax(std::vector<double>{0.3, 0.1}, 0.1);
    EXPECT_NEAR(p[0], 0.8808, 1e-4);
    EXPECT_NEAR(p[1], 0.1192, 1e-4);
}

TEST(Softmax, NonPositiveTemperatureIsDomainError) {
    EXPECT_THROW(softmax(std::vector<double>{0.1, 0.2}, 0.0), DomainError);
    EXPECT_THROW(softmax(std::vector<double>{0.1, 0.2}, -1.0), DomainError);
}

TEST(Softmax, SumsToOneAndStaysFiniteForLargeLogits) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto x = random_tensor({7}, seed, 50.0);
        auto p = softmax(x.data(), 0.01);
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
        for (double v : p) EXPECT_TRUE(std::isfinite(v));
    }
}

TEST(Softmax, PermutationEquivariant) {
    auto x = random_tensor({5}, 9);
    std::vector<double> logits(x.data().begin(), x.data().end());
    const auto p = softmax(logits, 0.1);
    std::vector<std::size_t> perm{3, 0, 4, 1, 2};
    std::vector<double> permuted;
    for (auto i : perm) permuted.push_back(logits[i]);
    const auto q = softmax(permuted, 0.1);
    for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_DOUBLE_EQ(q[i], p[perm[i]]);
}

TEST(Log, NonPositiveIsDomainError) {
    Tape tape;
    EXPECT_THROW(log(tape.constant(Tensor::vector({1.0, 0.0}))), DomainError);
}

TEST(Backward, SumGivesOnes) {
    Tape tape;
    auto x = tape.leaf(Tensor::vector({1, 2, 3}).set_requires_grad(true));
    tape.backward(sum(x));
    auto g = tape.grad(x);
    for (double v : g.data()) EXPECT_EQ(v, 1.0);
}

TEST(Backward, CosineMaximumIsStationary) {
    Tape tape;
    auto x0 = random_tensor({5}, 4);
    auto x = tape.leaf(Tensor(x0).set_requires_grad(true));
    tape.backward(cosine_sim(x, tape.constant(x0)));
    const auto g = tape.grad(x);
    for (double v : g.data()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Backward, AccumulatesUntilZeroed) {
    Tape tape;
    auto x = tape.leaf(Tensor::vector({1, 2}).set_requires_grad(true));
    auto y = sum(square(x));
    tape.backward(y);
    tape.backward(y);
    EXPECT_DOUBLE_EQ(tape.grad(x)[1], 8.0);
    tape.zero_grad();
    tape.backward(y);
    EXPECT_DOUBLE_EQ(tape.grad(x)[1], 4.0);
}

TEST(Backward, NonScalarOutputIsUsageError) {
    Tape tape;
    auto x = tape.leaf(Tensor::vector({1, 2}).set_requires_grad(true));
    EXPECT_THROW(tape.backward(square(x)), UsageError);
}

TEST(Backward, ConstantsReceiveNoGradient) {
    Tape tape;
    auto x = tape.leaf(Tensor::vector({1, 2}).set_requires_grad(true));
    auto c = tape.constant(Tensor::vector({3, 4}));
    tape.backward(sum(mul(x, c)));
    EXPECT_FALSE(tape.needs_grad(c));
    const auto g = tape.grad(c);
    for (double v : g.data()) EXPECT_EQ(v, 0.0);
}

TEST(GradCheck, Polynomial) {
    auto err = check([](Tape&, Var x) { return sum(square(x)); }, Tensor::vector({3.0}));
    EXPECT_LE(err, 1e-6);
}

TEST(GradCheck, NonFiniteValueIsNumericError) {
    auto fn = [](Tape& t, Var x) { return sum(mul(x, t.constant(Tensor::vector({INFINITY})))); };
    EXPECT_THROW(grad_check(fn, Tensor::vector({1.0})), NumericError);
}

// Ten seeded instances per primitive, each against central differences.
class PrimitiveGrad : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(PrimitiveGrad, Add) {
    const auto s = GetParam();
    auto other = random_tensor({3, 4}, s + 1);
    EXPECT_LE(check([&](Tape& t, Var x) { return project(t, add(x, t.constant(other)), s); }, random_tensor({3, 4}, s)),
              1e-4);
}

TEST_P(PrimitiveGrad, SubMulScale) {
    const auto s = GetParam();
    auto other = random_tensor({3, 4}, s + 1);
    auto fn = [&](Tape& t, Var x) {
        auto o = t.constant(other);
        return project(t, add_scalar(scale(mul(sub(x, o), x), 0.7), 0.3), s);
    };
    EXPECT_LE(check(fn, random_tensor({3, 4}, s)), 1e-4);
}

TEST_P(PrimitiveGrad, AddRowBroadcast) {
    const auto s = GetParam();
    auto base = random_tensor({3, 4}, s + 1);
    EXPECT_LE(check([&](Tape& t, Var b) { return project(t, add_row(t.constant(base), b), s); }, random_tensor({4}, s)),
              1e-4);
}

TEST_P(PrimitiveGrad, MatmulBothOperands) {
    const auto s = GetParam();
    auto a = random_tensor({3, 5}, s + 1);
    auto b = random_tensor({5, 2}, s + 2);
    EXPECT_LE(check([&](Tape& t, Var x) { return project(t, matmul(x, t.constant(b)), s); }, a), 1e-4);
    EXPECT_LE(check([&](Tape& t, Var x) { return project(t, matmul(t.constant(a), x), s); }, b), 1e-4);
}

TEST_P(PrimitiveGrad, Transpose) {
    const auto s = GetParam();
    EXPECT_LE(check([&](Tape& t, Var x) { return project(t, transpose(x), s); }, random_tensor({3, 2}, s)), 1e-4);
}

TEST_P(PrimitiveGrad, LayerNormInputAndAffine) {
    const auto s = GetParam();
    auto x0 = random_tensor({3, 6}, s);
    auto g0 = random_tensor({6}, s + 1);
    auto b0 = random_tensor({6}, s + 2);
    EXPECT_LE(check([&](Tape& t, Var x) { return project(t, layer_norm(x, t.constant(g0), t.constant(b0)), s); }, x0),
              1e-4);
    EXPECT_LE(check([&](Tape& t, Var g) { return project(t, layer_norm(t.constant(x0), g, t.constant(b0)), s); }, g0),
              1e-4);
}

TEST_P(PrimitiveGrad, Gelu) {
    const auto s = GetParam();
    EXPECT_LE(check([&](Tape& t, Var x) { return project(t, gelu(x), s); }, random_tensor({4, 3}, s)), 1e-4);
}

TEST_P(PrimitiveGrad, MultiHeadAttention) {
    const auto s = GetParam();
    auto k0 = random_tensor({4, 6}, s + 1);
    auto v0 = random_tensor({4, 6}, s + 2);
    auto self = [&](Tape& t, Var x) { return project(t, attention(x, x, x, 2), s); };
    EXPECT_LE(check(self, random_tensor({4, 6}, s)), 1e-4);
    auto q_only = [&](Tape& t, Var q) { return project(t, attention(q, t.constant(k0), t.constant(v0), 3), s); };
    EXPECT_LE(check(q_only, random_tensor({4, 6}, s)), 1e-4);
}

TEST_P(PrimitiveGrad, L2NormalizeRows) {
    const auto s = GetParam();
    EXPECT_LE(check([&](Tape& t, Var x) { return project(t, l2_normalize_rows(x), s); }, random_tensor({3, 5}, s)),
              1e-4);
}

TEST_P(PrimitiveGrad, CosineSim) {
    const auto s = GetParam();
    auto other = random_tensor({5}, s + 1);
    EXPECT_LE(check([&](Tape& t, Var x) { return cosine_sim(x, t.constant(other)); }, random_tensor({5}, s)), 1e-4);
}

TEST_P(PrimitiveGrad, SoftmaxAndLogSoftmax) {
    const auto s = GetParam();
    auto x0 = random_tensor({3, 4}, s);
    EXPECT_LE(check([&](Tape& t, Var x) { return project(t, softmax_rows(x, 0.5), s); }, x0), 1e-4);
    EXPECT_LE(check([&](Tape& t, Var x) { return project(t, log_softmax_rows(x, 0.5), s); }, x0), 1e-4);
}

TEST_P(PrimitiveGrad, Log) {
    const auto s = GetParam();
    EXPECT_LE(check([&](Tape& t, Var x) { return project(t, log(x), s); }, positive(random_tensor({6}, s))), 1e-4);
}

TEST_P(PrimitiveGrad, SquareSumMean) {
    const auto s = GetParam();
    EXPECT_LE(check([&](Tape&, Var x) { return add(mean(square(x)), scale(sum(x), 0.3)); }, random_tensor({2, 3}, s)),
              1e-4);
}

TEST_P(PrimitiveGrad, RowSliceStackPick) {
    const auto s = GetParam();
    std::vector<std::size_t> idx{1, 0, 2};
    auto fn = [&](Tape& t, Var x) {
        std::vector<Var> parts{row(x, 2), slice_rows(x, 0, 2)};
        auto stacked = stack_rows(parts);
        return project(t, pick(stacked, idx), s);
    };
    EXPECT_LE(check(fn, random_tensor({3, 3}, s)), 1e-4);
}

INSTANTIATE_TEST_SUITE_P(Seeds, PrimitiveGrad, ::testing::Range<std::uint64_t>(1, 11));

TEST(Determinism, RepeatedForwardIsBitwiseIdentical) {
    auto x0 = random_tensor({4, 6}, 3);
    auto run = [&] {
        Tape t;
        auto x = t.constant(x0);
        return Tensor(l2_normalize_rows(gelu(attention(x, x, x, 2))).value());
    };
    EXPECT_TRUE(run().same_values(run()));
}
