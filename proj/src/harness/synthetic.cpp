// SPDX-License-Identifier: Apache-2.0

#include "lamm/harness/synthetic.hpp"

#include <algorithm>
#include <random>

#include "lamm/errors.hpp"
#include "lamm/prompting/backbone.hpp"
#include "lamm/training/trainer.hpp"

namespace lamm {

namespace {

std::vector<std::string> vocabulary_words(const std::vector<std::string>& categories) {
    auto words = bundled_words();
    for (const auto& c : categories)
        if (std::find(words.begin(), words.end(), c) == words.end()) words.push_back(c);
    return words;
}

// Q * m for every row m, with Q a seeded random orthogonal matrix
// (Gram-Schmidt over Gaussian columns).
num::Tensor rotate_rows(const num::Tensor& rows, std::uint64_t seed) {
    const auto d = rows.cols();
    std::mt19937_64 rng(seed ^ 0x5851f42d4c957f2dULL);
    std::normal_distribution<double> normal(0.0, 1.0);
    num::Tensor q({d, d});
    for (std::size_t i = 0; i < d; ++i) {
        auto qi = q.row(i);
        for (auto& v : qi) v = normal(rng);
        for (std::size_t j = 0; j < i; ++j) {
            const double p = num::dot(qi, q.row(j));
            auto qj = q.row(j);
            for (std::size_t k = 0; k < d; ++k) qi[k] -= p * qj[k];
        }
        const double n = num::l2_norm(qi);
        for (auto& v : qi) v /= n;
    }
    num::Tensor out({rows.rows(), d});
    for (std::size_t r = 0; r < rows.rows(); ++r)
        for (std::size_t i = 0; i < d; ++i) out.at(r, i) = num::dot(q.row(i), rows.row(r));
    return out;
}

}  // namespace

SyntheticSet make_synthetic_set(const SyntheticSetConfig& config, ModelConfig encoder) {
    if (config.per_class == 0) throw ConfigError("synthetic set needs at least one item per class");
    const SyntheticFeatureGenerator gen(config.features);
    const auto K = config.features.classes;
    auto categories = synthetic_category_names(K);
    auto vocab = make_seeded_vocabulary(vocabulary_words(categories), config.d_model, config.vocab_seed);

    encoder.d_feat = config.features.d_feat;
    num::Tensor words({K, config.d_model});
    for (std::size_t c = 0; c < K; ++c) {
        auto e = vocab.embedding(vocab.id(categories[c]));
        std::copy(e.begin(), e.end(), words.row(c).begin());
    }

    if (config.align_epochs > 0) {
        // One pseudo-item per class sitting exactly on its mean; CE only.
        FeatureDataset anchors;
        anchors.categories = categories;
        anchors.d_feat = config.features.d_feat;
        const auto targets = config.adversarial ? rotate_rows(gen.means(), config.vocab_seed) : gen.means();
        for (std::uint32_t c = 0; c < K; ++c) {
            auto m = targets.row(c);
            anchors.records.push_back({c, c, std::vector<double>(m.begin(), m.end())});
        }
        TrainConfig tc;
        tc.shots = 1;
        tc.seed = config.vocab_seed;
        tc.epochs = config.align_epochs;
        tc.lr = config.align_lr;
        tc.lambda1 = 0.0;
        tc.lambda2 = 0.0;
        tc.lambda3 = 0.0;
        const auto backbone = make_backbone(encoder, vocab);
        const auto aligned = train(backbone, anchors, tc);
        words = aligned.table.rows();
    }

    num::Tensor emb = vocab.embeddings();
    for (std::size_t c = 0; c < K; ++c) {
        auto dst = emb.row(vocab.id(categories[c]));
        auto src = words.row(c);
        std::copy(src.begin(), src.end(), dst.begin());
    }

    SyntheticSet out{gen.generate(categories, config.per_class, 0), Vocabulary(vocab.tokens(), std::move(emb))};
    return out;
}

FeatureDataset make_shifted_features(const SyntheticSetConfig& config, double sigma, std::uint64_t first_id) {
    auto params = config.features;
    params.sigma = sigma;
    const SyntheticFeatureGenerator gen(params);
    return gen.generate(synthetic_category_names(params.classes), config.per_class, first_id);
}

}  // namespace lamm
