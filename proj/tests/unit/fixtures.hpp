// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "lamm/harness/synthetic.hpp"
#include "lamm/numerics/tensor.hpp"
#include "lamm/prompting/backbone.hpp"

namespace lamm::testing {

inline num::Tensor random_tensor(num::Shape shape, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, scale);
    num::Tensor t(std::move(shape));
    for (auto& v : t.data()) v = normal(rng);
    return t;
}

inline ModelConfig small_model(std::size_t d_model = 16, std::size_t d_feat = 8) {
    ModelConfig mc;
    mc.d_model = d_model;
    mc.d_feat = d_feat;
    mc.n_layers = 2;
    mc.n_heads = 4;
    return mc;
}

/// Seeded vocabulary over the bundled words plus the given category names.
inline Backbone small_backbone(const std::vector<std::string>& categories, std::size_t d_model = 16,
                               std::size_t d_feat = 8) {
    auto words = bundled_words();
    for (const auto& c : categories)
        for (const auto& w : split_whitespace(c))
            if (std::find(words.begin(), words.end(), w) == words.end()) words.push_back(w);
    return make_backbone(small_model(d_model, d_feat), make_seeded_vocabulary(words, d_model, 3));
}

/// K=4 synthetic set, quick to align and train.
inline SyntheticSetConfig tiny_set_config() {
    SyntheticSetConfig sc;
    sc.features.classes = 4;
    sc.features.d_feat = 16;
    sc.features.sigma = 0.25;
    sc.per_class = 12;
    sc.d_model = 16;
    sc.align_epochs = 20;
    return sc;
}

inline ModelConfig tiny_model() { return small_model(16, 16); }

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("lamm_test_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace lamm::testing
