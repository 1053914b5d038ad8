// SPDX-License-Identifier: Apache-2.0

#include "lamm/prompting/backbone.hpp"

#include "lamm/errors.hpp"
#include "lamm/numerics/ops.hpp"

namespace lamm {

Backbone make_backbone(ModelConfig config, Vocabulary vocab, std::string prompt_template) {
    config.d_model = vocab.d_model();
    config.validate();
    Backbone b{config, init_text_encoder(config), std::move(vocab), std::move(prompt_template)};
    return b;
}

num::Tensor reference_features(const Backbone& backbone, const std::vector<std::string>& class_names) {
    const auto& cfg = backbone.config;
    num::Tensor out({class_names.size(), cfg.d_feat});
    ClassEmbeddingTable none;
    for (std::size_t i = 0; i < class_names.size(); ++i) {
        auto seq = build_reference_prompt(backbone.vocab, backbone.prompt_template, class_names[i], cfg.max_seq_len);
        auto f = encode_text(backbone.encoder, embed_sequence(seq, backbone.vocab, none, nullptr));
        std::copy(f.begin(), f.end(), out.row(i).begin());
    }
    return out;
}

std::vector<PromptSequence> build_prompts(const Backbone& backbone, const ClassEmbeddingTable& table,
                                          const SoftContext* context) {
    if (table.d_model() != backbone.vocab.d_model()) throw UsageError("class table width differs from the vocabulary");
    std::vector<PromptSequence> prompts;
    prompts.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i)
        prompts.push_back(build_prompt(backbone.vocab, table, i, context, backbone.prompt_template,
                                       backbone.config.max_seq_len));
    return prompts;
}

num::Tensor prompt_features(const Backbone& backbone, const ClassEmbeddingTable& table, const SoftContext* context) {
    const auto prompts = build_prompts(backbone, table, context);
    num::Tensor out({table.size(), backbone.config.d_feat});
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        auto f = encode_text(backbone.encoder, embed_sequence(prompts[i], backbone.vocab, table, context));
        std::copy(f.begin(), f.end(), out.row(i).begin());
    }
    return out;
}

num::Var prompt_features(num::Tape& tape, const Backbone& backbone, std::span<const PromptSequence> prompts,
                         std::span<const num::Var> class_rows, num::Var context) {
    std::vector<num::Var> feats;
    feats.reserve(prompts.size());
    for (const auto& p : prompts)
        feats.push_back(encode_text(backbone.encoder, embed_sequence(tape, p, backbone.vocab, class_rows, context)));
    return num::stack_rows(feats);
}

}  // namespace lamm
