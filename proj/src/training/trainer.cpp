// SPDX-License-Identifier: Apache-2.0

#include "lamm/training/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <unordered_map>

#include "lamm/errors.hpp"
#include "lamm/numerics/ops.hpp"
#include "lamm/training/optimizer.hpp"

namespace lamm {

void TrainConfig::validate() const {
    if (shots == 0) throw ConfigError("shots must be positive");
    if (epochs == 0) throw ConfigError("epochs must be at least 1");
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("learning rate must be a finite non-negative value");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
    weights();
}

TrainResult train(const Backbone& backbone, const FeatureDataset& pool, const TrainConfig& config) {
    config.validate();
    auto table = init_table(backbone.vocab, pool.categories, config.init, config.seed);
    std::optional<SoftContext> context;
    if (config.context_len > 0) context = init_context(backbone.vocab, config.context_len, config.seed);
    return train(backbone, pool, config, TrainState{std::move(table), std::move(context)});
}

namespace {

struct ItemRef {
    std::size_t record;  // index into the pool
    std::size_t label;   // table row
};

std::size_t argmax_lowest(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace

TrainResult train(const Backbone& backbone, const FeatureDataset& pool, const TrainConfig& config, TrainState state) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    const auto weights = config.weights();
    const double tau = backbone.tau();
    if (pool.d_feat != backbone.config.d_feat) {
        throw DataError("feature width " + std::to_string(pool.d_feat) + " differs from the encoder's d_feat " +
                        std::to_string(backbone.config.d_feat));
    }

    auto& table = state.table;
    auto& context = state.context;
    if (!config.train_class_rows) table.set_all_trainable(false);
    const auto K = table.size();
    const auto d = table.d_model();

    std::vector<std::size_t> label_to_row(pool.categories.size());
    for (std::size_t l = 0; l < pool.categories.size(); ++l) {
        auto row = table.find(pool.categories[l]);
        if (!row) throw DataError("category '" + pool.categories[l] + "' has no row in the class table");
        label_to_row[l] = *row;
    }

    auto split = sample_few_shot(pool, config.shots, config.seed);
    std::unordered_map<std::uint64_t, std::size_t> by_id;
    for (std::size_t i = 0; i < pool.records.size(); ++i) by_id.emplace(pool.records[i].id, i);
    std::vector<ItemRef> items;
    for (auto id : split.all_train_ids()) {
        const auto rec = by_id.at(id);
        items.push_back({rec, label_to_row[pool.records[rec].label]});
    }

    const auto prompts = build_prompts(backbone, table, context ? &*context : nullptr);
    const auto teacher = reference_features(backbone, table.class_names());

    const auto n_items = items.size();
    const auto batch_size = config.batch_size ? config.batch_size : std::min<std::size_t>(32, n_items);
    const auto steps_per_epoch = (n_items + batch_size - 1) / batch_size;
    const auto total_steps = steps_per_epoch * config.epochs;

    num::Tensor row_velocity({K, d});
    num::Tensor ctx_velocity;
    if (context) ctx_velocity = num::Tensor(context->vectors.shape());
    const bool train_context = context && context->trainable;

    std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    TrainResult result;
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(items.begin(), items.end(), shuffle_rng);
        std::size_t correct = 0;
        for (std::size_t start = 0; start < n_items; start += batch_size, ++step) {
            const auto count = std::min(batch_size, n_items - start);
            const double lr_t = cosine_lr(config.lr, step, total_steps);

            num::Tensor batch({count, pool.d_feat});
            num::Tensor teacher_cos({count, K});
            std::vector<std::size_t> labels(count);
            for (std::size_t b = 0; b < count; ++b) {
                const auto& item = items[start + b];
                const auto& f = pool.records[item.record].feature;
                std::copy(f.begin(), f.end(), batch.row(b).begin());
                for (std::size_t k = 0; k < K; ++k) teacher_cos.at(b, k) = num::dot(f, teacher.row(k));
                labels[b] = item.label;
            }

            num::Tape tape;
            std::vector<num::Var> rows;
            std::vector<num::Var> params;
            std::vector<const num::Tensor*> refs;
            std::vector<num::Tensor> ref_rows;
            ref_rows.reserve(K);
            for (std::size_t k = 0; k < K; ++k) {
                auto r = table.rows().row_copy(k);
                r.set_requires_grad(table.trainable(k));
                rows.push_back(tape.leaf(std::move(r)));
                if (table.trainable(k)) {
                    ref_rows.push_back(table.reference_rows().row_copy(k));
                    params.push_back(rows.back());
                    refs.push_back(&ref_rows.back());
                }
            }
            num::Var ctx_var;
            if (context) {
                auto v = context->vectors;
                v.set_requires_grad(train_context);
                ctx_var = tape.leaf(std::move(v));
                if (train_context) {
                    params.push_back(ctx_var);
                    refs.push_back(&context->initial);
                }
            }

            auto feats = prompt_features(tape, backbone, prompts, rows, ctx_var);
            auto cosines = num::matmul(tape.constant(std::move(batch)), num::transpose(feats));
            auto ce = ce_loss(cosines, labels, tau);
            auto wc = wc_loss(tape, params, refs);
            auto cs = cos_loss(feats, teacher);
            auto kd = kd_loss(cosines, teacher_cos, config.kd_mode, tau);
            auto loss = total_loss(ce, wc, cs, kd, weights);

            if (auto bad = loss.breakdown.non_finite_terms(); !bad.empty()) {
                throw NumericError("non-finite loss term(s) " + bad + " at step " + std::to_string(step) +
                                   " (epoch " + std::to_string(epoch) + ")");
            }
            for (std::size_t b = 0; b < count; ++b)
                correct += argmax_lowest(cosines.value().row(b)) == labels[b];

            tape.backward(loss.total);
            for (std::size_t k = 0; k < K; ++k) {
                if (!table.trainable(k)) continue;
                auto g = tape.grad(rows[k]);
                std::vector<double> updated(table.rows().row(k).begin(), table.rows().row(k).end());
                momentum_step(updated, g.data(), row_velocity.row(k), lr_t, config.momentum);
                table.set_row(k, updated);
            }
            if (train_context) {
                auto g = tape.grad(ctx_var);
                momentum_step(context->vectors.data(), g.data(), ctx_velocity.data(), lr_t, config.momentum);
            }
            result.trace.steps.push_back({step, epoch, loss.breakdown, lr_t});
        }
        result.trace.epoch_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(n_items));
    }

    result.trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.table = std::move(table);
    result.context = std::move(context);
    result.split = std::move(split);
    return result;
}

}  // namespace lamm
