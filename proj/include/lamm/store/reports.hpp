// SPDX-License-Identifier: Apache-2.0
//
// Report schemas.
//
// JSON reports are objects with a "kind" field:
//   eval         accuracy, n, per_class[{category, accuracy, count}], fingerprint, seeds
//   incremental  acc_set1_before, acc_set2, acc_set1_after, degradation, set1_rows_unchanged, set1, set2, mode
//   sweep        seeds, rows[{shots, mean, per_seed}]
//   ablation     seeds, rows[{wc, cos, kd, accuracy, per_seed}]
//
// CSV tables (header line, then one numeric row per record):
//   trace     step,epoch,ce,wc,cos,kd,total,lr
//   sweep     shots,mean,seed_<s>...
//   ablation  wc,cos,kd,accuracy

#pragma once

#include <string>
#include <vector>

#include "lamm/harness/experiments.hpp"

namespace lamm::store {

std::string eval_report_json(const EvalReport& report);
std::string incremental_report_json(const IncrementalReport& report, IncrementalMode mode);
std::string sweep_json(const SweepResult& sweep);
std::string ablation_json(const std::vector<AblationRow>& rows, const std::vector<std::uint64_t>& seeds);

std::string trace_csv(const TrainTrace& trace);
std::string sweep_csv(const SweepResult& sweep);
std::string ablation_csv(const std::vector<AblationRow>& rows);

/// Checks a JSON report or CSV table against the schemas above; returns a
/// one-line summary, throws DataError otherwise.
std::string validate_report_text(const std::string& text);

}  // namespace lamm::store
