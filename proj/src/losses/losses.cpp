// SPDX-License-Identifier: Apache-2.0

#include "lamm/losses/losses.hpp"

#include <algorithm>
#include <cmath>

#include "lamm/errors.hpp"
#include "lamm/numerics/ops.hpp"

namespace lamm {

std::string to_string(KdMode m) {
    return m == KdMode::literal ? "literal" : "swapped";
}

KdMode parse_kd_mode(std::string_view s) {
    if (s == "literal") return KdMode::literal;
    if (s == "swapped") return KdMode::swapped;
    throw UsageError("unknown kd mode '" + std::string(s) + "' (expected literal|swapped)");
}

LossWeights LossWeights::defaults(std::size_t shots) {
    if (shots == 0) throw ConfigError("shots must be positive");
    return LossWeights{1.0 / static_cast<double>(shots), 1.0, 0.05, shots};
}

LossWeights LossWeights::with_overrides(std::size_t shots, std::optional<double> lambda1,
                                        std::optional<double> lambda2, std::optional<double> lambda3) {
    auto w = defaults(shots);
    if (lambda1) w.lambda1 = *lambda1;
    if (lambda2) w.lambda2 = *lambda2;
    if (lambda3) w.lambda3 = *lambda3;
    w.validate();
    return w;
}

void LossWeights::validate() const {
    if (shots == 0) throw ConfigError("shots must be positive");
    const std::pair<const char*, double> all[] = {{"lambda1", lambda1}, {"lambda2", lambda2}, {"lambda3", lambda3}};
    for (const auto& [name, v] : all)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be a finite non-negative value");
}

bool LossBreakdown::all_finite() const {
    return non_finite_terms().empty();
}

std::string LossBreakdown::non_finite_terms() const {
    std::string out;
    const std::pair<const char*, double> all[] = {{"ce", ce}, {"wc", wc}, {"cos", cos}, {"kd", kd}, {"total", total}};
    for (const auto& [name, v] : all)
        if (!std::isfinite(v)) out += (out.empty() ? "" : ", ") + std::string(name);
    return out;
}

std::vector<double> predict_probs(std::span<const double> cosines, double tau) {
    return num::softmax(cosines, tau);
}

num::Var ce_loss(num::Var cosines, std::span<const std::size_t> labels, double tau) {
    const auto& s = cosines.value();
    if (s.rank() != 2 || s.rows() == 0) throw UsageError("ce_loss: cosines must be a non-empty [B x K] matrix");
    if (labels.size() != s.rows()) throw UsageError("ce_loss: need one label per row");
    for (auto l : labels)
        if (l >= s.cols()) throw UsageError("ce_loss: label " + std::to_string(l) + " out of range for " +
                                            std::to_string(s.cols()) + " classes");
    auto logp = num::pick(num::log_softmax_rows(cosines, tau), labels);
    return num::scale(num::mean(logp), -1.0);
}

num::Var wc_loss(num::Tape& tape, std::span<const num::Var> params, std::span<const num::Tensor* const> references) {
    if (params.size() != references.size()) throw UsageError("wc_loss: one reference per parameter");
    std::vector<num::Var> parts;
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto diff = num::sub(params[i], tape.constant_ref(*references[i]));
        parts.push_back(num::sum(num::square(diff)));
    }
    if (parts.empty()) return tape.constant(num::Tensor::scalar(0.0));
    return num::sum(num::stack_rows(parts));
}

double wc_loss(const ClassEmbeddingTable& table, const SoftContext* context) {
    double total = 0.0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!table.trainable(i)) continue;
        auto r = table.rows().row(i);
        auto ref = table.reference_rows().row(i);
        for (std::size_t c = 0; c < r.size(); ++c) total += (r[c] - ref[c]) * (r[c] - ref[c]);
    }
    if (context && context->trainable) {
        for (std::size_t i = 0; i < context->vectors.size(); ++i) {
            const double d = context->vectors[i] - context->initial[i];
            total += d * d;
        }
    }
    return total;
}

num::Var cos_loss(num::Var student, const num::Tensor& teacher) {
    const auto& s = student.value();
    if (s.shape() != teacher.shape() || s.rank() != 2) throw UsageError("cos_loss: student and teacher shapes differ");
    auto& tape = *student.tape;
    std::vector<num::Var> sims;
    for (std::size_t i = 0; i < s.rows(); ++i)
        sims.push_back(num::cosine_sim(num::row(student, i), tape.constant(teacher.row_copy(i))));
    auto total = num::sum(num::stack_rows(sims));
    return num::add_scalar(num::scale(total, -1.0), static_cast<double>(s.rows()));
}

double cos_loss(const num::Tensor& student, const num::Tensor& teacher) {
    if (student.shape() != teacher.shape()) throw UsageError("cos_loss: student and teacher shapes differ");
    double total = 0.0;
    for (std::size_t i = 0; i < student.rows(); ++i) total += 1.0 - num::cosine(student.row(i), teacher.row(i));
    return total;
}

num::Var kd_loss(num::Var student, const num::Tensor& teacher, KdMode mode, double tau) {
    const auto& s = student.value();
    if (s.shape() != teacher.shape() || s.rank() != 2) throw UsageError("kd_loss: student and teacher shapes differ");
    auto& tape = *student.tape;
    const auto batch = static_cast<double>(s.rows());
    num::Tensor weights(teacher.shape());
    if (mode == KdMode::literal) {
        for (std::size_t i = 0; i < teacher.size(); ++i)
            weights[i] = std::log(std::clamp(teacher[i], kKdClampFloor, 1.0));
        auto prod = num::mul(student, tape.constant(std::move(weights)));
        return num::scale(num::sum(prod), -1.0 / batch);
    }
    for (std::size_t r = 0; r < teacher.rows(); ++r) {
        auto p = num::softmax(teacher.row(r), tau);
        std::copy(p.begin(), p.end(), weights.row(r).begin());
    }
    auto prod = num::mul(num::log_softmax_rows(student, tau), tape.constant(std::move(weights)));
    return num::scale(num::sum(prod), -1.0 / batch);
}

double kd_loss_literal(std::span<const double> student, std::span<const double> teacher, std::size_t batch) {
    if (student.size() != teacher.size() || batch == 0) throw UsageError("kd_loss: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < student.size(); ++i) s += student[i] * std::log(std::clamp(teacher[i], kKdClampFloor, 1.0));
    return -s / static_cast<double>(batch);
}

WeightedLoss total_loss(num::Var ce, num::Var wc, num::Var cos, num::Var kd, const LossWeights& weights) {
    weights.validate();
    auto total = num::add(ce, num::scale(wc, weights.lambda1));
    total = num::add(total, num::scale(cos, weights.lambda2));
    total = num::add(total, num::scale(kd, weights.lambda3));
    LossBreakdown b;
    b.ce = ce.value().item();
    b.wc = wc.value().item();
    b.cos = cos.value().item();
    b.kd = kd.value().item();
    b.total = total.value().item();
    return {total, b};
}

}  // namespace lamm
