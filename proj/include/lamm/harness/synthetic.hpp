// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "lamm/encoders/image_features.hpp"
#include "lamm/encoders/model_config.hpp"
#include "lamm/prompting/vocabulary.hpp"

namespace lamm {

struct SyntheticSetConfig {
    SyntheticFeatureParams features;  // classes, d_feat, sigma, seed
    std::size_t per_class = 48;
    std::size_t d_model = 32;
    std::uint64_t vocab_seed = 11;
    std::size_t align_epochs = 40;  // 0 leaves category words unaligned
    double align_lr = 0.05;
    bool adversarial = false;  // align words to randomly rotated means instead of the means
};

struct SyntheticSet {
    FeatureDataset dataset;
    Vocabulary vocab;
};

/// Features from the generator plus a vocabulary whose category words are
/// tuned so the encoder maps "a photo of <name> ." near its class mean,
/// standing in for a pretrained text tower. `encoder` supplies the frozen
/// encoder (d_model is overridden by the set config).
SyntheticSet make_synthetic_set(const SyntheticSetConfig& config, ModelConfig encoder);

/// Same categories and vocabulary-independent features with a different noise
/// level and disjoint ids, for domain-shift runs.
FeatureDataset make_shifted_features(const SyntheticSetConfig& config, double sigma, std::uint64_t first_id);

}  // namespace lamm
