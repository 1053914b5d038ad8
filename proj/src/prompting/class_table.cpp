// SPDX-License-Identifier: Apache-2.0

#include "lamm/prompting/class_table.hpp"

#include <random>
#include <unordered_set>

#include "lamm/errors.hpp"

namespace lamm {

std::string to_string(InitMode m) {
    return m == InitMode::word ? "word" : "random";
}

InitMode parse_init_mode(std::string_view s) {
    if (s == "word") return InitMode::word;
    if (s == "random") return InitMode::random;
    throw UsageError("unknown init mode '" + std::string(s) + "' (expected word|random)");
}

ClassEmbeddingTable::ClassEmbeddingTable(std::vector<std::string> class_names, num::Tensor rows,
                                         num::Tensor reference_rows, std::vector<bool> trainable_mask)
    : class_names_(std::move(class_names)),
      rows_(std::move(rows)),
      reference_(std::move(reference_rows)),
      mask_(std::move(trainable_mask)) {
    const auto k = class_names_.size();
    if (rows_.rank() != 2 || rows_.rows() != k) throw DataError("class table rows do not match the class count");
    if (reference_.shape() != rows_.shape()) throw DataError("class table reference rows differ in shape from rows");
    if (mask_.size() != k) throw DataError("class table mask does not match the class count");
    std::unordered_set<std::string> seen;
    for (const auto& n : class_names_)
        if (!seen.insert(n).second) throw DataError("duplicate class name '" + n + "'");
}

void ClassEmbeddingTable::set_all_trainable(bool on) {
    std::fill(mask_.begin(), mask_.end(), on);
}

std::optional<std::size_t> ClassEmbeddingTable::find(std::string_view name) const {
    for (std::size_t i = 0; i < class_names_.size(); ++i)
        if (class_names_[i] == name) return i;
    return std::nullopt;
}

void ClassEmbeddingTable::set_row(std::size_t i, std::span<const double> values) {
    if (i >= size()) throw UsageError("class row " + std::to_string(i) + " out of range");
    if (!mask_[i]) throw UsageError("class row " + std::to_string(i) + " ('" + class_names_[i] + "') is frozen");
    if (values.size() != d_model()) throw UsageError("class row width mismatch");
    std::copy(values.begin(), values.end(), rows_.row(i).begin());
}

namespace {

std::vector<double> word_mean(const Vocabulary& vocab, const std::string& name) {
    const auto ids = vocab.tokenize(name);
    if (ids.empty()) throw TokenizationError("class name '" + name + "' has no tokens");
    std::vector<double> mean(vocab.d_model(), 0.0);
    for (auto id : ids) {
        auto e = vocab.embedding(id);
        for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += e[c];
    }
    if (ids.size() > 1)
        for (auto& v : mean) v /= static_cast<double>(ids.size());
    return mean;
}

num::Tensor fresh_rows(const Vocabulary& vocab, const std::vector<std::string>& names, InitMode mode,
                       std::uint64_t seed) {
    num::Tensor rows({names.size(), vocab.d_model()});
    if (mode == InitMode::word) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            auto m = word_mean(vocab, names[i]);
            std::copy(m.begin(), m.end(), rows.row(i).begin());
        }
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 0.02);
        for (auto& v : rows.data()) v = normal(rng);
    }
    return rows;
}

}  // namespace

ClassEmbeddingTable init_table(const Vocabulary& vocab, const std::vector<std::string>& class_names, InitMode mode,
                               std::uint64_t seed) {
    if (class_names.empty()) throw UsageError("class table needs at least one class");
    auto rows = fresh_rows(vocab, class_names, mode, seed);
    auto reference = rows;
    return ClassEmbeddingTable(class_names, std::move(rows), std::move(reference),
                               std::vector<bool>(class_names.size(), true));
}

ClassEmbeddingTable extend_table(const ClassEmbeddingTable& table, const std::vector<std::string>& new_names,
                                 const Vocabulary& vocab, InitMode mode, std::uint64_t seed, bool freeze_existing) {
    for (const auto& n : new_names)
        if (table.find(n)) throw UsageError("class '" + n + "' already exists in the table");
    if (vocab.d_model() != table.d_model()) throw UsageError("vocabulary width differs from class table width");

    const auto k = table.size();
    const auto d = table.d_model();
    auto added = fresh_rows(vocab, new_names, mode, seed);

    auto names = table.class_names();
    names.insert(names.end(), new_names.begin(), new_names.end());
    num::Tensor rows({names.size(), d});
    num::Tensor reference({names.size(), d});
    std::copy(table.rows().data().begin(), table.rows().data().end(), rows.data().begin());
    std::copy(table.reference_rows().data().begin(), table.reference_rows().data().end(), reference.data().begin());
    std::copy(added.data().begin(), added.data().end(), rows.data().begin() + static_cast<std::ptrdiff_t>(k * d));
    std::copy(added.data().begin(), added.data().end(), reference.data().begin() + static_cast<std::ptrdiff_t>(k * d));

    auto mask = table.trainable_mask();
    if (freeze_existing) std::fill(mask.begin(), mask.end(), false);
    mask.resize(names.size(), true);
    return ClassEmbeddingTable(std::move(names), std::move(rows), std::move(reference), std::move(mask));
}

SoftContext init_context(const Vocabulary& vocab, std::size_t length, std::uint64_t seed) {
    if (length == 0) throw UsageError("context length must be positive");
    const auto d = vocab.d_model();
    const std::vector<std::string> words = {"a", "photo", "of"};
    const auto from_words = std::min(length, words.size());
    const auto random_count = length - from_words;

    SoftContext ctx;
    ctx.vectors = num::Tensor({length, d});
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 0.02);
    for (std::size_t i = 0; i < random_count; ++i)
        for (auto& v : ctx.vectors.row(i)) v = normal(rng);
    for (std::size_t j = 0; j < from_words; ++j) {
        auto e = vocab.embedding(vocab.id(words[words.size() - from_words + j]));
        std::copy(e.begin(), e.end(), ctx.vectors.row(random_count + j).begin());
    }
    ctx.initial = ctx.vectors;
    return ctx;
}

}  // namespace lamm
