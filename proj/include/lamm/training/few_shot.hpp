// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lamm/encoders/image_features.hpp"

namespace lamm {

/// Exactly `shots` training items per class, drawn from a labeled pool.
struct FewShotSplit {
    std::size_t shots = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::uint64_t>> train_ids;  // per class, pool order
    std::vector<std::uint64_t> test_ids;                // pool items not selected

    std::vector<std::uint64_t> all_train_ids() const;
};

/// Seeded sampling without replacement, class by class in index order.
/// Throws DataError naming any class with fewer than `shots` items.
FewShotSplit sample_few_shot(const FeatureDataset& pool, std::size_t shots, std::uint64_t seed);

/// Records of `pool` whose ids are listed, in listed order.
FeatureDataset select_items(const FeatureDataset& pool, const std::vector<std::uint64_t>& ids);

}  // namespace lamm
