// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lamm/encoders/image_features.hpp"
#include "lamm/prompting/backbone.hpp"

namespace lamm {

struct EvalReport {
    double accuracy = 0.0;
    std::vector<std::string> categories;
    std::vector<double> per_class_accuracy;  // NaN-free; classes without items report 0
    std::vector<std::size_t> per_class_count;
    std::size_t n = 0;
    std::string fingerprint;  // hex digest of everything the predictions depend on
    std::vector<std::uint64_t> seeds;
};

/// Which table rows enter the softmax.
enum class EvalScope {
    all_rows,         // every row of the table
    dataset_classes,  // only rows named by the test set's categories
};

/// Predicts argmax_j cos(I_x, class_features_j) for every test item. Ties go to
/// the lowest column. `label_to_column` maps each dataset label to its column.
/// Throws UsageError on an empty test set.
EvalReport evaluate_features(const num::Tensor& class_features, std::span<const std::size_t> label_to_column,
                             const FeatureDataset& test);

/// Classification with the label-aligned prompts of `table`; dataset categories
/// are matched to rows by name (DataError when one is missing).
EvalReport evaluate(const Backbone& backbone, const ClassEmbeddingTable& table, const SoftContext* context,
                    const FeatureDataset& test, EvalScope scope = EvalScope::all_rows);

/// Classification with the original category-word prompts; nothing trainable is involved.
EvalReport zero_shot_eval(const Backbone& backbone, const FeatureDataset& test);

std::string hex64(std::uint64_t v);

}  // namespace lamm
