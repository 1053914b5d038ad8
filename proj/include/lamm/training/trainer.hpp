// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "lamm/encoders/image_features.hpp"
#include "lamm/losses/losses.hpp"
#include "lamm/prompting/backbone.hpp"
#include "lamm/training/few_shot.hpp"

namespace lamm {

struct TrainConfig {
    std::size_t shots = 16;
    std::uint64_t seed = 1;
    std::size_t epochs = 50;
    std::size_t batch_size = 0;  // 0 selects min(32, K * shots)
    double lr = 0.002;
    double momentum = 0.9;
    std::optional<double> lambda1;  // unset: 1 / shots
    std::optional<double> lambda2;  // unset: 1
    std::optional<double> lambda3;  // unset: 0.05
    KdMode kd_mode = KdMode::literal;
    InitMode init = InitMode::word;
    std::size_t context_len = 0;  // 0 disables the soft context
    bool train_class_rows = true;

    LossWeights weights() const { return LossWeights::with_overrides(shots, lambda1, lambda2, lambda3); }
    /// Throws ConfigError: shots or epochs of 0, negative lr, momentum outside [0, 1), bad lambdas.
    void validate() const;
};

struct StepRecord {
    std::size_t step = 0;
    std::size_t epoch = 0;
    LossBreakdown loss;
    double lr = 0.0;
};

struct TrainTrace {
    std::vector<StepRecord> steps;
    std::vector<double> epoch_accuracy;  // running train accuracy of each epoch's batches
    double wall_seconds = 0.0;
};

/// Starting point for a run that continues from an existing table/context.
struct TrainState {
    ClassEmbeddingTable table;
    std::optional<SoftContext> context;
};

struct TrainResult {
    ClassEmbeddingTable table;
    std::optional<SoftContext> context;
    TrainTrace trace;
    FewShotSplit split;
};

/// Fresh run: table initialized from the pool's category names.
TrainResult train(const Backbone& backbone, const FeatureDataset& pool, const TrainConfig& config);

/// Continues from `state`. Pool categories are matched to table rows by name;
/// logits always span every table row. Only rows flagged trainable (and a
/// trainable context) change. Throws NumericError when a loss term turns
/// non-finite.
TrainResult train(const Backbone& backbone, const FeatureDataset& pool, const TrainConfig& config, TrainState state);

}  // namespace lamm
