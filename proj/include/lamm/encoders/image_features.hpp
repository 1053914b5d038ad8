// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lamm/numerics/tensor.hpp"

namespace lamm {

struct FeatureRecord {
    std::uint64_t id = 0;
    std::uint32_t label = 0;
    std::vector<double> feature;
};

/// Labeled image features plus the category-name table they index into.
struct FeatureDataset {
    std::vector<std::string> categories;
    std::size_t d_feat = 0;
    std::vector<FeatureRecord> records;

    /// Throws DataError on bad labels, wrong feature widths or duplicate ids.
    void validate() const;
    std::vector<std::size_t> class_counts() const;

    /// Records of the listed categories, relabeled to their position in `classes`.
    FeatureDataset subset(std::span<const std::uint32_t> classes) const;
};

/// Rescales to unit length when the norm deviates from 1 by more than 1e-6,
/// warning when the deviation exceeds 1e-3. Zero vectors are a DataError.
void normalize_feature(std::vector<double>& feature, std::uint64_t id);

/// Read-only id -> unit feature lookup over a dataset.
class ImageFeatureProvider {
public:
    enum class Source { feature_file, synthetic };

    ImageFeatureProvider(FeatureDataset dataset, Source source);

    Source source() const noexcept { return source_; }
    std::size_t d_feat() const noexcept { return dataset_.d_feat; }
    const FeatureDataset& dataset() const noexcept { return dataset_; }

    /// Throws LookupError for unknown ids.
    std::span<const double> get(std::uint64_t id) const;

private:
    FeatureDataset dataset_;
    Source source_;
    std::unordered_map<std::uint64_t, std::size_t> index_;
};

inline std::span<const double> get_image_feature(const ImageFeatureProvider& provider, std::uint64_t id) {
    return provider.get(id);
}

struct SyntheticFeatureParams {
    std::size_t classes = 10;
    std::size_t d_feat = 64;
    double sigma = 0.25;
    std::uint64_t seed = 1;
};

/// Class means uniform on the unit sphere; item features are
/// normalize(mean_c + sigma * n) with n ~ N(0, I / d_feat) seeded by
/// (seed, c, id), so sigma is the expected noise norm.
class SyntheticFeatureGenerator {
public:
    explicit SyntheticFeatureGenerator(SyntheticFeatureParams params);

    const SyntheticFeatureParams& params() const noexcept { return params_; }
    const num::Tensor& means() const noexcept { return means_; }
    std::vector<double> feature(std::uint32_t cls, std::uint64_t id) const;

    /// per_class items for every class, ids first_id, first_id + 1, ... in class-major order.
    FeatureDataset generate(std::vector<std::string> categories, std::size_t per_class, std::uint64_t first_id) const;

private:
    SyntheticFeatureParams params_;
    num::Tensor means_;  // [classes x d_feat]
};

}  // namespace lamm
