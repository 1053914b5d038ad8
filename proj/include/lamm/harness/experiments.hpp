// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lamm/harness/evaluate.hpp"
#include "lamm/training/trainer.hpp"

namespace lamm {

/// Held-out items for a run: the explicit test set when given, else the pool
/// items the few-shot sample left out.
FeatureDataset held_out(const FeatureDataset& pool, const FewShotSplit& split, const FeatureDataset* test);

struct SweepRow {
    std::size_t shots = 0;
    std::vector<double> per_seed;  // in seed-list order
    double mean = 0.0;
};

struct SweepResult {
    std::vector<std::uint64_t> seeds;
    std::vector<SweepRow> rows;  // in shot-list order
};

inline const std::vector<std::size_t> kDefaultShots{1, 2, 4, 8, 16};
inline const std::vector<std::uint64_t> kDefaultSeeds{1, 2, 3};

/// One train + evaluate per (shot, seed); config.shots and config.seed are overridden.
SweepResult few_shot_sweep(const Backbone& backbone, const FeatureDataset& pool, const TrainConfig& config,
                           const std::vector<std::size_t>& shots = kDefaultShots,
                           const std::vector<std::uint64_t>& seeds = kDefaultSeeds,
                           const FeatureDataset* test = nullptr);

struct AblationRow {
    bool wc = false;
    bool cos = false;
    bool kd = false;
    double accuracy = 0.0;  // seed-averaged
    std::vector<double> per_seed;
};

/// All eight on/off combinations of the three regularizers, CE always on.
/// An enabled term keeps its weight from `config` (or the default); a disabled
/// one is zeroed. Every combination reuses the same seeds.
std::vector<AblationRow> run_ablation(const Backbone& backbone, const FeatureDataset& pool, const TrainConfig& config,
                                      const std::vector<std::uint64_t>& seeds = kDefaultSeeds,
                                      const FeatureDataset* test = nullptr);

enum class IncrementalMode {
    lamm,  // per-class rows; phase-1 rows and any context frozen in phase 2
    coop,  // shared context only; class rows never train
};

struct IncrementalConfig {
    TrainConfig train;
    IncrementalMode mode = IncrementalMode::lamm;
    bool joint_softmax = false;  // score Set 1 against every table row instead of Set 1's rows
    std::size_t coop_context_len = 4;  // used when train.context_len is 0
    bool coop_ce_only = true;          // plain CoOp carries no hierarchical loss
};

struct IncrementalReport {
    double acc_set1_before = 0.0;
    double acc_set2 = 0.0;
    double acc_set1_after = 0.0;
    double degradation = 0.0;  // acc_set1_before - acc_set1_after
    bool set1_rows_unchanged = false;
    std::vector<std::string> set1;
    std::vector<std::string> set2;
};

/// First ceil(K/2) category indices, then the rest.
std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> default_incremental_split(std::size_t classes);

/// Trains on Set 1, scores it, extends the table with Set 2 (old rows frozen),
/// trains on Set 2 only and scores both sets. UsageError when the sets overlap
/// or either is empty.
IncrementalReport run_incremental(const Backbone& backbone, const FeatureDataset& pool,
                                  const std::vector<std::uint32_t>& set1, const std::vector<std::uint32_t>& set2,
                                  const IncrementalConfig& config);

/// Scores a trained table on features from another distribution. The alternate
/// set must declare exactly `categories` and the encoder's d_feat (DataError).
EvalReport domain_shift_eval(const Backbone& backbone, const ClassEmbeddingTable& table, const SoftContext* context,
                             const std::vector<std::string>& categories, const FeatureDataset& alternate);

}  // namespace lamm
