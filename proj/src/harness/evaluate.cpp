// SPDX-License-Identifier: Apache-2.0

#include "lamm/harness/evaluate.hpp"

#include <cstdio>

#include "lamm/errors.hpp"

namespace lamm {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

EvalReport evaluate_features(const num::Tensor& class_features, std::span<const std::size_t> label_to_column,
                             const FeatureDataset& test) {
    if (test.records.empty()) throw UsageError("evaluation needs a non-empty test set");
    if (label_to_column.size() != test.categories.size())
        throw UsageError("evaluate: label map does not cover every category");
    if (class_features.cols() != test.d_feat) {
        throw DataError("feature width " + std::to_string(test.d_feat) + " differs from class features width " +
                        std::to_string(class_features.cols()));
    }
    const auto K = class_features.rows();
    const auto C = test.categories.size();
    std::vector<std::size_t> hits(C, 0);
    EvalReport r;
    r.categories = test.categories;
    r.per_class_count.assign(C, 0);
    std::size_t correct = 0;
    for (const auto& rec : test.records) {
        if (rec.label >= C) throw DataError("item " + std::to_string(rec.id) + " has an invalid label");
        std::size_t best = 0;
        double best_score = num::dot(rec.feature, class_features.row(0));
        for (std::size_t j = 1; j < K; ++j) {
            const double s = num::dot(rec.feature, class_features.row(j));
            if (s > best_score) {
                best = j;
                best_score = s;
            }
        }
        ++r.per_class_count[rec.label];
        if (best == label_to_column[rec.label]) {
            ++hits[rec.label];
            ++correct;
        }
    }
    r.n = test.records.size();
    r.accuracy = static_cast<double>(correct) / static_cast<double>(r.n);
    r.per_class_accuracy.assign(C, 0.0);
    for (std::size_t c = 0; c < C; ++c)
        if (r.per_class_count[c] > 0)
            r.per_class_accuracy[c] = static_cast<double>(hits[c]) / static_cast<double>(r.per_class_count[c]);
    return r;
}

EvalReport evaluate(const Backbone& backbone, const ClassEmbeddingTable& table, const SoftContext* context,
                    const FeatureDataset& test, EvalScope scope) {
    if (test.records.empty()) throw UsageError("evaluation needs a non-empty test set");
    std::vector<std::size_t> rows_of_label(test.categories.size());
    for (std::size_t l = 0; l < test.categories.size(); ++l) {
        auto row = table.find(test.categories[l]);
        if (!row) throw DataError("category '" + test.categories[l] + "' has no row in the class table");
        rows_of_label[l] = *row;
    }

    const auto all = prompt_features(backbone, table, context);
    num::Tensor feats;
    std::vector<std::size_t> columns;
    if (scope == EvalScope::all_rows) {
        feats = all;
        columns = rows_of_label;
    } else {
        feats = num::Tensor({rows_of_label.size(), all.cols()});
        for (std::size_t l = 0; l < rows_of_label.size(); ++l) {
            auto src = all.row(rows_of_label[l]);
            std::copy(src.begin(), src.end(), feats.row(l).begin());
            columns.push_back(l);
        }
    }
    auto report = evaluate_features(feats, columns, test);

    auto h = num::content_hash(table.rows(), backbone.encoder.hash());
    h = num::content_hash(table.reference_rows(), h);
    if (context) h = num::content_hash(context->vectors, h);
    h = num::content_hash(backbone.vocab.embeddings(), h);
    report.fingerprint = hex64(h);
    return report;
}

EvalReport zero_shot_eval(const Backbone& backbone, const FeatureDataset& test) {
    if (test.records.empty()) throw UsageError("evaluation needs a non-empty test set");
    const auto feats = reference_features(backbone, test.categories);
    std::vector<std::size_t> columns(test.categories.size());
    for (std::size_t i = 0; i < columns.size(); ++i) columns[i] = i;
    auto report = evaluate_features(feats, columns, test);
    report.fingerprint = hex64(num::content_hash(backbone.vocab.embeddings(), backbone.encoder.hash()));
    return report;
}

}  // namespace lamm
