// SPDX-License-Identifier: Apache-2.0

#include "lamm/harness/experiments.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "lamm/errors.hpp"

namespace lamm {

FeatureDataset held_out(const FeatureDataset& pool, const FewShotSplit& split, const FeatureDataset* test) {
    if (test) return *test;
    return select_items(pool, split.test_ids);
}

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double train_and_score(const Backbone& backbone, const FeatureDataset& pool, const TrainConfig& config,
                       const FeatureDataset* test) {
    const auto run = train(backbone, pool, config);
    const auto eval_set = held_out(pool, run.split, test);
    return evaluate(backbone, run.table, run.context ? &*run.context : nullptr, eval_set).accuracy;
}

}  // namespace

SweepResult few_shot_sweep(const Backbone& backbone, const FeatureDataset& pool, const TrainConfig& config,
                           const std::vector<std::size_t>& shots, const std::vector<std::uint64_t>& seeds,
                           const FeatureDataset* test) {
    if (shots.empty() || seeds.empty()) throw UsageError("sweep needs at least one shot count and one seed");
    SweepResult out;
    out.seeds = seeds;
    for (auto n : shots) {
        SweepRow row;
        row.shots = n;
        for (auto seed : seeds) {
            auto c = config;
            c.shots = n;
            c.seed = seed;
            row.per_seed.push_back(train_and_score(backbone, pool, c, test));
        }
        row.mean = mean_of(row.per_seed);
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::vector<AblationRow> run_ablation(const Backbone& backbone, const FeatureDataset& pool, const TrainConfig& config,
                                      const std::vector<std::uint64_t>& seeds, const FeatureDataset* test) {
    if (seeds.empty()) throw UsageError("ablation needs at least one seed");
    const auto full = config.weights();
    std::vector<AblationRow> rows;
    for (int mask = 0; mask < 8; ++mask) {
        AblationRow row;
        row.wc = mask & 1;
        row.cos = mask & 2;
        row.kd = mask & 4;
        auto c = config;
        c.lambda1 = row.wc ? full.lambda1 : 0.0;
        c.lambda2 = row.cos ? full.lambda2 : 0.0;
        c.lambda3 = row.kd ? full.lambda3 : 0.0;
        for (auto seed : seeds) {
            c.seed = seed;
            row.per_seed.push_back(train_and_score(backbone, pool, c, test));
        }
        row.accuracy = mean_of(row.per_seed);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> default_incremental_split(std::size_t classes) {
    std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> out;
    const auto half = (classes + 1) / 2;
    for (std::uint32_t c = 0; c < classes; ++c) (c < half ? out.first : out.second).push_back(c);
    return out;
}

IncrementalReport run_incremental(const Backbone& backbone, const FeatureDataset& pool,
                                  const std::vector<std::uint32_t>& set1, const std::vector<std::uint32_t>& set2,
                                  const IncrementalConfig& config) {
    if (set1.empty() || set2.empty()) throw UsageError("incremental run needs two non-empty class sets");
    const std::set<std::uint32_t> s1(set1.begin(), set1.end());
    for (auto c : set2)
        if (s1.contains(c)) throw UsageError("class '" + pool.categories.at(c) + "' appears in both sets");
    for (auto c : s1)
        if (c >= pool.categories.size()) throw UsageError("class index " + std::to_string(c) + " out of range");
    for (auto c : set2)
        if (c >= pool.categories.size()) throw UsageError("class index " + std::to_string(c) + " out of range");

    const auto pool1 = pool.subset(set1);
    const auto pool2 = pool.subset(set2);
    const auto scope = config.joint_softmax ? EvalScope::all_rows : EvalScope::dataset_classes;
    const bool coop = config.mode == IncrementalMode::coop;

    auto tc = config.train;
    if (coop) {
        tc.train_class_rows = false;
        if (tc.context_len == 0) tc.context_len = config.coop_context_len;
        if (config.coop_ce_only) tc.lambda1 = tc.lambda2 = tc.lambda3 = 0.0;
    }

    IncrementalReport report;
    report.set1 = pool1.categories;
    report.set2 = pool2.categories;

    auto phase1 = train(backbone, pool1, tc);
    const auto test1 = select_items(pool1, phase1.split.test_ids);
    const SoftContext* ctx1 = phase1.context ? &*phase1.context : nullptr;
    report.acc_set1_before = evaluate(backbone, phase1.table, ctx1, test1, scope).accuracy;
    const auto set1_rows = phase1.table.rows();

    auto extended = extend_table(phase1.table, pool2.categories, backbone.vocab, tc.init, tc.seed, true);
    auto context = phase1.context;
    if (context && !coop) context->trainable = false;
    auto phase2 = train(backbone, pool2, tc, TrainState{std::move(extended), std::move(context)});

    const SoftContext* ctx2 = phase2.context ? &*phase2.context : nullptr;
    const auto test2 = select_items(pool2, phase2.split.test_ids);
    report.acc_set2 = evaluate(backbone, phase2.table, ctx2, test2, scope).accuracy;
    report.acc_set1_after = evaluate(backbone, phase2.table, ctx2, test1, scope).accuracy;
    report.degradation = report.acc_set1_before - report.acc_set1_after;

    report.set1_rows_unchanged = true;
    for (std::size_t i = 0; i < set1_rows.rows(); ++i) {
        auto before = set1_rows.row(i);
        auto after = phase2.table.rows().row(i);
        if (!std::equal(before.begin(), before.end(), after.begin(), after.end(),
                        [](double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }))
            report.set1_rows_unchanged = false;
    }
    return report;
}

EvalReport domain_shift_eval(const Backbone& backbone, const ClassEmbeddingTable& table, const SoftContext* context,
                             const std::vector<std::string>& categories, const FeatureDataset& alternate) {
    if (alternate.categories != categories)
        throw DataError("alternate feature set declares a different category list");
    if (alternate.d_feat != backbone.config.d_feat) {
        throw DataError("alternate feature width " + std::to_string(alternate.d_feat) + " differs from d_feat " +
                        std::to_string(backbone.config.d_feat));
    }
    return evaluate(backbone, table, context, alternate);
}

}  // namespace lamm
