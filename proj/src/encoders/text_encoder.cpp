// SPDX-License-Identifier: Apache-2.0

#include "lamm/encoders/text_encoder.hpp"

#include <random>
#include <string>

#include "lamm/errors.hpp"
#include "lamm/numerics/ops.hpp"

namespace lamm {

void ModelConfig::validate() const {
    if (!(tau > 0.0)) throw ConfigError("tau must be positive");
    if (d_model == 0 || d_feat == 0 || n_layers == 0 || n_heads == 0 || max_seq_len == 0) {
        throw ConfigError("model extents must be nonzero");
    }
    if (d_model % n_heads != 0) {
        throw ConfigError("d_model (" + std::to_string(d_model) + ") is not divisible by n_heads (" +
                          std::to_string(n_heads) + ")");
    }
}

namespace {

constexpr double kInitStd = 0.02;

class ParamSampler {
public:
    explicit ParamSampler(std::uint64_t seed) : rng_(seed), dist_(0.0, kInitStd) {}

    num::Tensor gaussian(num::Shape shape) {
        num::Tensor t(std::move(shape));
        for (auto& v : t.data()) v = dist_(rng_);
        return t;
    }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> dist_;
};

num::Tensor filled(std::size_t n, double v) {
    return num::Tensor({n}, v);
}

}  // namespace

TextEncoderParams init_text_encoder(const ModelConfig& config) {
    config.validate();
    ParamSampler sample(config.seed);
    const auto d = config.d_model;
    const auto hidden = 4 * d;

    TextEncoderParams p;
    p.config_ = config;
    p.positional_ = sample.gaussian({config.max_seq_len, d});
    for (std::size_t l = 0; l < config.n_layers; ++l) {
        EncoderLayer layer;
        layer.ln1_gain = filled(d, 1.0);
        layer.ln1_bias = filled(d, 0.0);
        layer.wq = sample.gaussian({d, d});
        layer.bq = sample.gaussian({d});
        layer.wk = sample.gaussian({d, d});
        layer.bk = sample.gaussian({d});
        layer.wv = sample.gaussian({d, d});
        layer.bv = sample.gaussian({d});
        layer.wo = sample.gaussian({d, d});
        layer.bo = sample.gaussian({d});
        layer.ln2_gain = filled(d, 1.0);
        layer.ln2_bias = filled(d, 0.0);
        layer.w_up = sample.gaussian({d, hidden});
        layer.b_up = sample.gaussian({hidden});
        layer.w_down = sample.gaussian({hidden, d});
        layer.b_down = sample.gaussian({d});
        p.layers_.push_back(std::move(layer));
    }
    p.lnf_gain_ = filled(d, 1.0);
    p.lnf_bias_ = filled(d, 0.0);
    p.projection_ = sample.gaussian({d, config.d_feat});
    return p;
}

std::uint64_t TextEncoderParams::hash() const {
    std::uint64_t h = num::content_hash(positional_);
    for (const auto& l : layers_) {
        for (const auto* t : {&l.ln1_gain, &l.ln1_bias, &l.wq, &l.bq, &l.wk, &l.bk, &l.wv, &l.bv, &l.wo, &l.bo,
                              &l.ln2_gain, &l.ln2_bias, &l.w_up, &l.b_up, &l.w_down, &l.b_down}) {
            h = num::content_hash(*t, h);
        }
    }
    h = num::content_hash(lnf_gain_, h);
    h = num::content_hash(lnf_bias_, h);
    return num::content_hash(projection_, h);
}

num::Var encode_text(const TextEncoderParams& params, num::Var sequence) {
    using namespace num;
    const auto& cfg = params.config();
    const auto& seq = sequence.value();
    if (seq.rank() != 2 || seq.cols() != cfg.d_model) {
        throw UsageError("encode_text: sequence must be [T x " + std::to_string(cfg.d_model) + "], got " +
                         shape_str(seq.shape()));
    }
    const auto T = seq.rows();
    if (T == 0) throw UsageError("encode_text: empty sequence");
    if (T > cfg.max_seq_len) {
        throw UsageError("encode_text: sequence length " + std::to_string(T) + " exceeds max_seq_len " +
                         std::to_string(cfg.max_seq_len));
    }

    auto& tape = *sequence.tape;
    auto c = [&tape](const Tensor& t) { return tape.constant_ref(t); };

    auto x = add(sequence, slice_rows(c(params.positional()), 0, T));
    for (const auto& l : params.layers()) {
        auto h = layer_norm(x, c(l.ln1_gain), c(l.ln1_bias));
        auto q = add_row(matmul(h, c(l.wq)), c(l.bq));
        auto k = add_row(matmul(h, c(l.wk)), c(l.bk));
        auto v = add_row(matmul(h, c(l.wv)), c(l.bv));
        auto a = attention(q, k, v, cfg.n_heads);
        x = add(x, add_row(matmul(a, c(l.wo)), c(l.bo)));

        h = layer_norm(x, c(l.ln2_gain), c(l.ln2_bias));
        auto up = gelu(add_row(matmul(h, c(l.w_up)), c(l.b_up)));
        x = add(x, add_row(matmul(up, c(l.w_down)), c(l.b_down)));
    }
    auto last = row(x, T - 1);
    auto pooled = layer_norm(last, c(params.final_gain()), c(params.final_bias()));
    return l2_normalize_rows(matmul(pooled, c(params.projection())));
}

std::vector<double> encode_text(const TextEncoderParams& params, const num::Tensor& sequence) {
    num::Tape tape;
    auto out = encode_text(params, tape.constant_ref(sequence));
    auto d = out.value().data();
    return {d.begin(), d.end()};
}

}  // namespace lamm
