// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <vector>

#include "lamm/encoders/text_encoder.hpp"
#include "lamm/prompting/prompt.hpp"

namespace lamm {

/// The frozen half of the system: text encoder, vocabulary, template, temperature.
struct Backbone {
    ModelConfig config;
    TextEncoderParams encoder;
    Vocabulary vocab;
    std::string prompt_template{kDefaultTemplate};

    double tau() const noexcept { return config.tau; }
};

/// Initializes the encoder from config, taking d_model from the vocabulary.
Backbone make_backbone(ModelConfig config, Vocabulary vocab, std::string prompt_template = std::string(kDefaultTemplate));

/// psi(y_i) for each name: [K x d_feat], unit rows.
num::Tensor reference_features(const Backbone& backbone, const std::vector<std::string>& class_names);

/// psi(z_i) (or psi(z*_i) with context) for every table row: [K x d_feat].
num::Tensor prompt_features(const Backbone& backbone, const ClassEmbeddingTable& table, const SoftContext* context);

/// The label-aligned prompts for all table rows, in row order.
std::vector<PromptSequence> build_prompts(const Backbone& backbone, const ClassEmbeddingTable& table,
                                          const SoftContext* context);

/// Differentiable psi(z_i) stacked to [K x d_feat].
num::Var prompt_features(num::Tape& tape, const Backbone& backbone, std::span<const PromptSequence> prompts,
                         std::span<const num::Var> class_rows, num::Var context);

}  // namespace lamm
