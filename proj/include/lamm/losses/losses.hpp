// SPDX-License-Identifier: Apache-2.0
//
// Hierarchical objective over three spaces:
//   parameters  wc  = sum (theta - theta_ref)^2
//   features    cos = sum_i 1 - cos(psi(z_i), psi(y_i))
//   logits      kd  = -mean_b sum_j s_bj * log(clamp(t_bj, 1e-4, 1))
// combined with cross-entropy as total = ce + l1*wc + l2*cos + l3*kd.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lamm/numerics/tape.hpp"
#include "lamm/prompting/class_table.hpp"

namespace lamm {

inline constexpr double kKdClampFloor = 1e-4;

enum class KdMode {
    literal,  // -s * log(clamp(t)), student cosine outside the log
    swapped,  // -softmax(t / tau) . log_softmax(s / tau)
};

std::string to_string(KdMode m);
KdMode parse_kd_mode(std::string_view s);

struct LossWeights {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double lambda3 = 0.05;
    std::size_t shots = 1;

    /// lambda1 = 1/n, lambda2 = 1, lambda3 = 0.05.
    static LossWeights defaults(std::size_t shots);
    /// Defaults with any given override applied; negative overrides are a ConfigError.
    static LossWeights with_overrides(std::size_t shots, std::optional<double> lambda1, std::optional<double> lambda2,
                                      std::optional<double> lambda3);
    void validate() const;
};

struct LossBreakdown {
    double ce = 0.0;
    double wc = 0.0;
    double cos = 0.0;
    double kd = 0.0;
    double total = 0.0;

    bool all_finite() const;
    /// Names of non-finite terms, comma separated; empty when all are finite.
    std::string non_finite_terms() const;
};

/// Softmax of cosines / tau over all K categories.
std::vector<double> predict_probs(std::span<const double> cosines, double tau);

/// Mean over the batch of -log p(label). cosines: [B x K].
num::Var ce_loss(num::Var cosines, std::span<const std::size_t> labels, double tau);

/// Sum of squared differences between each parameter and its reference.
num::Var wc_loss(num::Tape& tape, std::span<const num::Var> params, std::span<const num::Tensor* const> references);
/// Plain value over the trainable rows of a table (and a context, when given).
double wc_loss(const ClassEmbeddingTable& table, const SoftContext* context = nullptr);

/// sum_i (1 - cos(student_i, teacher_i)); student [K x d], teacher constant [K x d].
num::Var cos_loss(num::Var student, const num::Tensor& teacher);
double cos_loss(const num::Tensor& student, const num::Tensor& teacher);

/// Distillation in logit space; student [B x K] cosines, teacher constant [B x K].
num::Var kd_loss(num::Var student, const num::Tensor& teacher, KdMode mode, double tau);
/// Plain literal-mode value, used by tests and the self-distillation check.
double kd_loss_literal(std::span<const double> student, std::span<const double> teacher, std::size_t batch);

struct WeightedLoss {
    num::Var total;
    LossBreakdown breakdown;
};

/// Assembles ce + l1*wc + l2*cos + l3*kd on the tape. breakdown.total is the
/// value of the returned Var.
WeightedLoss total_loss(num::Var ce, num::Var wc, num::Var cos, num::Var kd, const LossWeights& weights);

}  // namespace lamm
