// SPDX-License-Identifier: Apache-2.0

#include "lamm/training/few_shot.hpp"

#include <algorithm>
#include <random>
#include <unordered_map>
#include <unordered_set>

#include "lamm/errors.hpp"

namespace lamm {

std::vector<std::uint64_t> FewShotSplit::all_train_ids() const {
    std::vector<std::uint64_t> out;
    for (const auto& ids : train_ids) out.insert(out.end(), ids.begin(), ids.end());
    return out;
}

FewShotSplit sample_few_shot(const FeatureDataset& pool, std::size_t shots, std::uint64_t seed) {
    if (shots == 0) throw UsageError("shots must be positive");
    std::vector<std::vector<std::uint64_t>> by_class(pool.categories.size());
    for (const auto& r : pool.records) {
        if (r.label >= by_class.size()) throw DataError("item " + std::to_string(r.id) + " has an invalid label");
        by_class[r.label].push_back(r.id);
    }

    FewShotSplit split;
    split.shots = shots;
    split.seed = seed;
    std::mt19937_64 rng(seed);
    std::unordered_set<std::uint64_t> chosen;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
        const auto& items = by_class[c];
        if (items.size() < shots) {
            throw DataError("class '" + pool.categories[c] + "' has " + std::to_string(items.size()) +
                            " items, fewer than the " + std::to_string(shots) + " shots requested");
        }
        std::vector<std::uint64_t> picked;
        std::sample(items.begin(), items.end(), std::back_inserter(picked), shots, rng);
        chosen.insert(picked.begin(), picked.end());
        split.train_ids.push_back(std::move(picked));
    }
    for (const auto& r : pool.records)
        if (!chosen.contains(r.id)) split.test_ids.push_back(r.id);
    return split;
}

FeatureDataset select_items(const FeatureDataset& pool, const std::vector<std::uint64_t>& ids) {
    std::unordered_map<std::uint64_t, std::size_t> index;
    for (std::size_t i = 0; i < pool.records.size(); ++i) index.emplace(pool.records[i].id, i);
    FeatureDataset out;
    out.categories = pool.categories;
    out.d_feat = pool.d_feat;
    for (auto id : ids) {
        auto it = index.find(id);
        if (it == index.end()) throw LookupError("unknown item id " + std::to_string(id));
        out.records.push_back(pool.records[it->second]);
    }
    return out;
}

}  // namespace lamm
