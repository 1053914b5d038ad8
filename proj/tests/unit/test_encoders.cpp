// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "lamm/encoders/image_features.hpp"
#include "lamm/encoders/text_encoder.hpp"
#include "lamm/errors.hpp"
#include "lamm/log.hpp"
#include "lamm/numerics/grad_check.hpp"
#include "lamm/numerics/ops.hpp"

using namespace lamm;
using lamm::testing::random_tensor;
using lamm::testing::small_model;

TEST(TextEncoder, SameSeedSameHash) {
    auto mc = small_model();
    EXPECT_EQ(init_text_encoder(mc).hash(), init_text_encoder(mc).hash());
}

TEST(TextEncoder, DifferentSeedDifferentHash) {
    auto a = small_model();
    auto b = a;
    b.seed = 8;
    EXPECT_NE(init_text_encoder(a).hash(), init_text_encoder(b).hash());
}

TEST(TextEncoder, IndivisibleHeadsIsConfigError) {
    auto mc = small_model();
    mc.d_model = 30;
    mc.n_heads = 4;
    EXPECT_THROW(init_text_encoder(mc), ConfigError);
    mc = small_model();
    mc.tau = 0.0;
    EXPECT_THROW(mc.validate(), ConfigError);
}

TEST(TextEncoder, OutputIsUnitNorm) {
    auto params = init_text_encoder(small_model());
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto out = encode_text(params, random_tensor({5, 16}, s, 0.02));
        ASSERT_EQ(out.size(), 8u);
        EXPECT_NEAR(num::l2_norm(out), 1.0, 1e-6);
    }
}

TEST(TextEncoder, Deterministic) {
    auto params = init_text_encoder(small_model());
    auto seq = random_tensor({5, 16}, 2, 0.02);
    EXPECT_EQ(encode_text(params, seq), encode_text(params, seq));
}

TEST(TextEncoder, SwappingTokensChangesOutput) {
    auto mc = small_model();
    mc.seed = 7;
    auto params = init_text_encoder(mc);
    auto seq = random_tensor({5, 16}, 3, 0.02);
    auto swapped = seq;
    for (std::size_t c = 0; c < 16; ++c) std::swap(swapped.at(1, c), swapped.at(3, c));
    auto a = encode_text(params, seq);
    auto b = encode_text(params, swapped);
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
    EXPECT_GT(gap, 1e-9);
}

TEST(TextEncoder, EmptyOrOverlengthIsUsageError) {
    auto params = init_text_encoder(small_model());
    EXPECT_THROW(encode_text(params, num::Tensor({0, 16})), UsageError);
    EXPECT_THROW(encode_text(params, random_tensor({17, 16}, 1)), UsageError);
}

TEST(TextEncoder, InputGradientMatchesFiniteDifferences) {
    auto params = init_text_encoder(small_model());
    auto w = random_tensor({1, 8}, 77);
    auto fn = [&](num::Tape& t, num::Var seq) { return num::sum(num::mul(encode_text(params, seq), t.constant(w))); };
    EXPECT_LE(num::grad_check(fn, random_tensor({5, 16}, 4, 0.02)), 1e-4);
}

TEST(TextEncoder, ParametersReceiveNoGradient) {
    auto params = init_text_encoder(small_model());
    const auto before = params.hash();
    num::Tape tape;
    auto seq = tape.leaf(random_tensor({4, 16}, 5, 0.02).set_requires_grad(true));
    tape.backward(num::sum(encode_text(params, seq)));
    EXPECT_EQ(params.hash(), before);
    for (const auto& layer : params.layers()) EXPECT_FALSE(layer.wq.has_grad());
}

TEST(ImageFeatures, UnknownIdIsLookupError) {
    SyntheticFeatureGenerator gen({});
    ImageFeatureProvider provider(gen.generate(synthetic_category_names(10), 2, 0), ImageFeatureProvider::Source::synthetic);
    EXPECT_NO_THROW(provider.get(3));
    EXPECT_THROW(get_image_feature(provider, 999), LookupError);
}

TEST(ImageFeatures, GeneratorReproducesBitwise) {
    SyntheticFeatureGenerator a({4, 16, 0.25, 9});
    SyntheticFeatureGenerator b({4, 16, 0.25, 9});
    EXPECT_EQ(a.feature(2, 17), b.feature(2, 17));
    EXPECT_NE(a.feature(2, 17), a.feature(2, 18));
    EXPECT_NEAR(num::l2_norm(a.feature(1, 3)), 1.0, 1e-12);
}

TEST(ImageFeatures, ZeroNoiseGivesTheMean) {
    SyntheticFeatureGenerator gen({3, 8, 0.0, 2});
    auto f = gen.feature(1, 5);
    auto m = gen.means().row(1);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f[i], m[i], 1e-12);
}

TEST(ImageFeatures, NormalizeWarnsOnlyPastTolerance) {
    std::vector<std::string> warnings;
    auto prev = set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
    std::vector<double> small{1.0 + 5e-7, 0.0};
    normalize_feature(small, 1);
    EXPECT_TRUE(warnings.empty());
    std::vector<double> big{2.0, 0.0};
    normalize_feature(big, 2);
    EXPECT_EQ(warnings.size(), 1u);
    EXPECT_DOUBLE_EQ(big[0], 1.0);
    std::vector<double> zero{0.0, 0.0};
    EXPECT_THROW(normalize_feature(zero, 3), DataError);
    set_warning_sink(prev);
}

TEST(ImageFeatures, DatasetValidation) {
    FeatureDataset ds{{"a", "b"}, 2, {{0, 0, {1, 0}}, {1, 2, {0, 1}}}};
    EXPECT_THROW(ds.validate(), DataError);
    ds.records[1].label = 1;
    ds.records[1].id = 0;
    EXPECT_THROW(ds.validate(), DataError);
    ds.records[1].id = 1;
    EXPECT_NO_THROW(ds.validate());
    auto sub = ds.subset(std::vector<std::uint32_t>{1});
    ASSERT_EQ(sub.records.size(), 1u);
    EXPECT_EQ(sub.records[0].label, 0u);
    EXPECT_EQ(sub.categories, std::vector<std::string>{"b"});
}
