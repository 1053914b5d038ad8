// SPDX-License-Identifier: Apache-2.0
//
// Frozen pre-LN transformer standing in for the text tower of a dual encoder.
// Token embeddings are not part of the encoder; callers assemble a
// [T x d_model] sequence of slot embeddings and the encoder maps it to a unit
// d_feat feature taken at the last position.

#pragma once

#include <cstdint>
#include <vector>

#include "lamm/encoders/model_config.hpp"
#include "lamm/numerics/tape.hpp"

namespace lamm {

struct EncoderLayer {
    num::Tensor ln1_gain, ln1_bias;
    num::Tensor wq, bq, wk, bk, wv, bv, wo, bo;
    num::Tensor ln2_gain, ln2_bias;
    num::Tensor w_up, b_up, w_down, b_down;
};

class TextEncoderParams {
public:
    const ModelConfig& config() const noexcept { return config_; }
    const num::Tensor& positional() const noexcept { return positional_; }
    const std::vector<EncoderLayer>& layers() const noexcept { return layers_; }
    const num::Tensor& final_gain() const noexcept { return lnf_gain_; }
    const num::Tensor& final_bias() const noexcept { return lnf_bias_; }
    const num::Tensor& projection() const noexcept { return projection_; }

    /// Content hash over every parameter tensor, in a fixed order.
    std::uint64_t hash() const;

private:
    friend TextEncoderParams init_text_encoder(const ModelConfig& config);

    ModelConfig config_;
    num::Tensor positional_;  // [max_seq_len x d_model]
    std::vector<EncoderLayer> layers_;
    num::Tensor lnf_gain_, lnf_bias_;
    num::Tensor projection_;  // [d_model x d_feat]
};

/// Seeded N(0, 0.02^2) weights, LayerNorm gain 1 and bias 0. No parameter requires grad.
TextEncoderParams init_text_encoder(const ModelConfig& config);

/// Differentiable w.r.t. the sequence only; params enter the tape as
/// aliased constants and must outlive it. Returns a [1 x d_feat] unit row.
num::Var encode_text(const TextEncoderParams& params, num::Var sequence);

/// Convenience forward pass without gradient tracking.
std::vector<double> encode_text(const TextEncoderParams& params, const num::Tensor& sequence);

}  // namespace lamm
