// SPDX-License-Identifier: Apache-2.0
//
// Prompt sequences: the zero-shot prompt y_i = "a photo of <name> .", the
// label-aligned prompt z_i with a trainable class slot, and the context
// variant [V_1]..[V_M][M_i].

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lamm/numerics/tape.hpp"
#include "lamm/prompting/class_table.hpp"
#include "lamm/prompting/vocabulary.hpp"

namespace lamm {

inline constexpr std::string_view kDefaultTemplate = "a photo of <CLASS> .";
inline constexpr std::string_view kClassPlaceholder = "<CLASS>";

struct Slot {
    enum class Kind { vocab, class_slot, context };

    Kind kind = Kind::vocab;
    std::size_t index = 0;  // token id, class index or context position

    bool operator==(const Slot&) const = default;
};

struct PromptSequence {
    std::vector<Slot> slots;

    std::size_t size() const noexcept { return slots.size(); }
    std::size_t class_slot_count() const;
};

/// y_i: every slot frozen; the class name's own tokens fill the placeholder.
PromptSequence build_reference_prompt(const Vocabulary& vocab, std::string_view template_text,
                                      std::string_view class_name, std::size_t max_len);

/// z_i (no context) or z*_i (with context). The class slot references table row class_index.
PromptSequence build_prompt(const Vocabulary& vocab, const ClassEmbeddingTable& table, std::size_t class_index,
                            const SoftContext* context, std::string_view template_text, std::size_t max_len);

/// Materializes slot embeddings as a plain [T x d_model] tensor.
num::Tensor embed_sequence(const PromptSequence& seq, const Vocabulary& vocab, const ClassEmbeddingTable& table,
                           const SoftContext* context);

/// Tape version. class_rows[i] is a [1 x d] Var for table row i; context is
/// an [M x d] Var or an empty Var when the sequence has no context slots.
num::Var embed_sequence(num::Tape& tape, const PromptSequence& seq, const Vocabulary& vocab,
                        std::span<const num::Var> class_rows, num::Var context);

}  // namespace lamm
