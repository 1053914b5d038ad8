// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lamm/numerics/tensor.hpp"
#include "lamm/prompting/vocabulary.hpp"

namespace lamm {

enum class InitMode { word, random };

std::string to_string(InitMode m);
InitMode parse_init_mode(std::string_view s);

/// One trainable embedding per category plus the frozen copies taken at creation.
///
/// Invariants: rows and reference rows share a shape; reference rows never
/// change; rows whose trainable flag is off are never written.
class ClassEmbeddingTable {
public:
    ClassEmbeddingTable() = default;
    /// Throws DataError when the parts disagree in extent or names repeat.
    ClassEmbeddingTable(std::vector<std::string> class_names, num::Tensor rows, num::Tensor reference_rows,
                        std::vector<bool> trainable_mask);

    std::size_t size() const noexcept { return class_names_.size(); }
    std::size_t d_model() const noexcept { return rows_.cols(); }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }
    const num::Tensor& rows() const noexcept { return rows_; }
    const num::Tensor& reference_rows() const noexcept { return reference_; }
    const std::vector<bool>& trainable_mask() const noexcept { return mask_; }

    bool trainable(std::size_t i) const { return mask_.at(i); }
    void set_trainable(std::size_t i, bool on) { mask_.at(i) = on; }
    void set_all_trainable(bool on);

    std::optional<std::size_t> find(std::string_view name) const;
    /// Throws UsageError when the row is frozen.
    void set_row(std::size_t i, std::span<const double> values);

    std::uint64_t reference_hash() const { return num::content_hash(reference_); }

private:
    std::vector<std::string> class_names_;
    num::Tensor rows_;
    num::Tensor reference_;
    std::vector<bool> mask_;
};

/// word: row = mean of the name's token embeddings; random: seeded N(0, 0.02^2).
/// Reference rows start as copies of rows. Every row starts trainable.
ClassEmbeddingTable init_table(const Vocabulary& vocab, const std::vector<std::string>& class_names, InitMode mode,
                               std::uint64_t seed);

/// Appends rows for new categories; existing rows, references and masks are
/// copied bitwise. Existing rows are frozen when freeze_existing is set.
ClassEmbeddingTable extend_table(const ClassEmbeddingTable& table, const std::vector<std::string>& new_names,
                                 const Vocabulary& vocab, InitMode mode, std::uint64_t seed,
                                 bool freeze_existing = true);

/// Shared learnable context vectors V_1..V_M placed before the class slot.
struct SoftContext {
    num::Tensor vectors;  // [M x d_model]
    num::Tensor initial;  // values at creation, reference for weight consolidation
    bool trainable = true;

    std::size_t length() const noexcept { return vectors.rows(); }
};

/// Last min(M, 3) vectors are the embeddings of "a photo of"; any leading
/// remainder is seeded N(0, 0.02^2).
SoftContext init_context(const Vocabulary& vocab, std::size_t length, std::uint64_t seed);

}  // namespace lamm
