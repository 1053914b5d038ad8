// SPDX-License-Identifier: Apache-2.0

#include "lamm/encoders/image_features.hpp"

#include <cmath>
#include <random>
#include <unordered_set>

#include "lamm/errors.hpp"
#include "lamm/log.hpp"

namespace lamm {

void FeatureDataset::validate() const {
    if (d_feat == 0) throw DataError("dataset has d_feat = 0");
    std::unordered_set<std::uint64_t> seen;
    for (const auto& r : records) {
        if (r.label >= categories.size()) {
            throw DataError("item " + std::to_string(r.id) + " has label " + std::to_string(r.label) +
                            " but only " + std::to_string(categories.size()) + " categories exist");
        }
        if (r.feature.size() != d_feat) {
            throw DataError("item " + std::to_string(r.id) + " has " + std::to_string(r.feature.size()) +
                            " feature values, expected " + std::to_string(d_feat));
        }
        if (!seen.insert(r.id).second) throw DataError("duplicate item id " + std::to_string(r.id));
    }
}

std::vector<std::size_t> FeatureDataset::class_counts() const {
    std::vector<std::size_t> counts(categories.size(), 0);
    for (const auto& r : records)
        if (r.label < counts.size()) ++counts[r.label];
    return counts;
}

FeatureDataset FeatureDataset::subset(std::span<const std::uint32_t> classes) const {
    FeatureDataset out;
    out.d_feat = d_feat;
    std::vector<std::int64_t> remap(categories.size(), -1);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto c = classes[i];
        if (c >= categories.size()) throw UsageError("subset: class index " + std::to_string(c) + " out of range");
        if (remap[c] >= 0) throw UsageError("subset: class " + categories[c] + " listed twice");
        remap[c] = static_cast<std::int64_t>(i);
        out.categories.push_back(categories[c]);
    }
    for (const auto& r : records) {
        if (remap[r.label] < 0) continue;
        auto copy = r;
        copy.label = static_cast<std::uint32_t>(remap[r.label]);
        out.records.push_back(std::move(copy));
    }
    return out;
}

void normalize_feature(std::vector<double>& feature, std::uint64_t id) {
    const double n = num::l2_norm(feature);
    if (!(n > 0.0) || !std::isfinite(n)) throw DataError("item " + std::to_string(id) + " has a zero or non-finite feature");
    const double dev = std::abs(n - 1.0);
    if (dev > 1e-3) warn("item " + std::to_string(id) + " feature norm " + std::to_string(n) + " renormalized to 1");
    if (dev > 1e-6)
        for (auto& v : feature) v /= n;
}

ImageFeatureProvider::ImageFeatureProvider(FeatureDataset dataset, Source source)
    : dataset_(std::move(dataset)), source_(source) {
    dataset_.validate();
    for (std::size_t i = 0; i < dataset_.records.size(); ++i) {
        auto& r = dataset_.records[i];
        normalize_feature(r.feature, r.id);
        index_.emplace(r.id, i);
    }
}

std::span<const double> ImageFeatureProvider::get(std::uint64_t id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw LookupError("unknown item id " + std::to_string(id));
    return dataset_.records[it->second].feature;
}

SyntheticFeatureGenerator::SyntheticFeatureGenerator(SyntheticFeatureParams params)
    : params_(params), means_({params.classes, params.d_feat}) {
    if (params.classes == 0 || params.d_feat == 0) throw ConfigError("synthetic generator needs classes and d_feat > 0");
    if (!(params.sigma >= 0.0)) throw ConfigError("synthetic sigma must be non-negative");
    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t c = 0; c < params.classes; ++c) {
        auto row = means_.row(c);
        for (auto& v : row) v = normal(rng);
        const double n = num::l2_norm(row);
        for (auto& v : row) v /= n;
    }
}

std::vector<double> SyntheticFeatureGenerator::feature(std::uint32_t cls, std::uint64_t id) const {
    if (cls >= params_.classes) throw UsageError("synthetic class " + std::to_string(cls) + " out of range");
    std::seed_seq seq{static_cast<std::uint32_t>(params_.seed), static_cast<std::uint32_t>(params_.seed >> 32), cls,
                      static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = params_.sigma / std::sqrt(static_cast<double>(params_.d_feat));
    auto mean = means_.row(cls);
    std::vector<double> f(params_.d_feat);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = mean[i] + scale * normal(rng);
    const double n = num::l2_norm(f);
    for (auto& v : f) v /= n;
    return f;
}

FeatureDataset SyntheticFeatureGenerator::generate(std::vector<std::string> categories, std::size_t per_class,
                                                   std::uint64_t first_id) const {
    if (categories.size() != params_.classes) throw UsageError("synthetic generate: category count mismatch");
    FeatureDataset ds;
    ds.categories = std::move(categories);
    ds.d_feat = params_.d_feat;
    std::uint64_t id = first_id;
    for (std::uint32_t c = 0; c < params_.classes; ++c)
        for (std::size_t j = 0; j < per_class; ++j, ++id) ds.records.push_back({id, c, feature(c, id)});
    return ds;
}

}  // namespace lamm
