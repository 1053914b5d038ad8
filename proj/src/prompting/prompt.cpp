// SPDX-License-Identifier: Apache-2.0

#include "lamm/prompting/prompt.hpp"

#include "lamm/errors.hpp"
#include "lamm/numerics/ops.hpp"

namespace lamm {

std::size_t PromptSequence::class_slot_count() const {
    std::size_t n = 0;
    for (const auto& s : slots) n += s.kind == Slot::Kind::class_slot;
    return n;
}

namespace {

struct SplitTemplate {
    std::vector<std::string> before;
    std::vector<std::string> after;
};

SplitTemplate split_template(std::string_view text) {
    const auto words = split_whitespace(text);
    if (words.empty()) throw UsageError("prompt template is empty");
    SplitTemplate t;
    bool seen = false;
    for (const auto& w : words) {
        if (w == kClassPlaceholder) {
            if (seen) throw UsageError("prompt template has more than one " + std::string(kClassPlaceholder));
            seen = true;
            continue;
        }
        (seen ? t.after : t.before).push_back(w);
    }
    if (!seen) throw UsageError("prompt template lacks " + std::string(kClassPlaceholder));
    return t;
}

void append_words(PromptSequence& seq, const Vocabulary& vocab, const std::vector<std::string>& words) {
    for (const auto& w : words) seq.slots.push_back({Slot::Kind::vocab, vocab.id(w)});
}

void check_length(const PromptSequence& seq, std::size_t max_len) {
    if (seq.size() > max_len) {
        throw UsageError("prompt has " + std::to_string(seq.size()) + " slots, more than max_seq_len " +
                         std::to_string(max_len));
    }
}

}  // namespace

PromptSequence build_reference_prompt(const Vocabulary& vocab, std::string_view template_text,
                                      std::string_view class_name, std::size_t max_len) {
    const auto t = split_template(template_text);
    const auto name_ids = vocab.tokenize(class_name);
    if (name_ids.empty()) throw TokenizationError("class name '" + std::string(class_name) + "' has no tokens");
    PromptSequence seq;
    append_words(seq, vocab, t.before);
    for (auto id : name_ids) seq.slots.push_back({Slot::Kind::vocab, id});
    append_words(seq, vocab, t.after);
    check_length(seq, max_len);
    return seq;
}

PromptSequence build_prompt(const Vocabulary& vocab, const ClassEmbeddingTable& table, std::size_t class_index,
                            const SoftContext* context, std::string_view template_text, std::size_t max_len) {
    if (class_index >= table.size()) {
        throw UsageError("class index " + std::to_string(class_index) + " out of range for " +
                         std::to_string(table.size()) + " classes");
    }
    PromptSequence seq;
    if (context) {
        for (std::size_t j = 0; j < context->length(); ++j) seq.slots.push_back({Slot::Kind::context, j});
        seq.slots.push_back({Slot::Kind::class_slot, class_index});
    } else {
        const auto t = split_template(template_text);
        append_words(seq, vocab, t.before);
        seq.slots.push_back({Slot::Kind::class_slot, class_index});
        append_words(seq, vocab, t.after);
    }
    check_length(seq, max_len);
    return seq;
}

num::Tensor embed_sequence(const PromptSequence& seq, const Vocabulary& vocab, const ClassEmbeddingTable& table,
                           const SoftContext* context) {
    const auto d = vocab.d_model();
    num::Tensor out({seq.size(), d});
    for (std::size_t t = 0; t < seq.size(); ++t) {
        const auto& s = seq.slots[t];
        std::span<const double> src;
        switch (s.kind) {
            case Slot::Kind::vocab:
                src = vocab.embedding(s.index);
                break;
            case Slot::Kind::class_slot:
                src = table.rows().row(s.index);
                break;
            case Slot::Kind::context:
                if (!context) throw UsageError("sequence has context slots but no context was given");
                src = context->vectors.row(s.index);
                break;
        }
        if (src.size() != d) throw UsageError("slot embedding width mismatch");
        std::copy(src.begin(), src.end(), out.row(t).begin());
    }
    return out;
}

num::Var embed_sequence(num::Tape& tape, const PromptSequence& seq, const Vocabulary& vocab,
                        std::span<const num::Var> class_rows, num::Var context) {
    std::vector<num::Var> parts;
    parts.reserve(seq.size());
    for (const auto& s : seq.slots) {
        switch (s.kind) {
            case Slot::Kind::vocab:
                parts.push_back(tape.constant(num::Tensor({1, vocab.d_model()},
                                                          std::vector<double>(vocab.embedding(s.index).begin(),
                                                                              vocab.embedding(s.index).end()))));
                break;
            case Slot::Kind::class_slot:
                if (s.index >= class_rows.size()) throw UsageError("class slot without a matching row Var");
                parts.push_back(class_rows[s.index]);
                break;
            case Slot::Kind::context:
                if (!context.valid()) throw UsageError("sequence has context slots but no context Var was given");
                parts.push_back(num::row(context, s.index));
                break;
        }
    }
    return num::stack_rows(parts);
}

}  // namespace lamm
