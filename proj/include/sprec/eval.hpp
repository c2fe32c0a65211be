// include/sprec/eval.hpp

// Copyright 2026  The sprec authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef SPREC_EVAL_HPP_
#define SPREC_EVAL_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sprec/corpus.hpp"
#include "sprec/models.hpp"

namespace sprec {

struct TrialScore {
  std::string claimed;
  std::string true_id;
  double raw = 0.0;
  std::optional<double> normalized;
};

// One train/test condition selection, e.g. train on M1 and test on M3.
struct Scenario {
  std::string name;
  ConditionFilter train_filter;
  ConditionFilter test_filter;
};

struct Cell {
  bool ok = false;
  double value = 0.0;       // identification rate, or EER with cohorts
  double value2 = 0.0;      // EER without cohorts
  bool has_pair = false;
  std::string error;
};

// Chains as rows, scenarios as columns.
struct ResultTable {
  std::vector<std::string> row_names;
  std::vector<std::string> col_names;
  std::vector<Cell> cells;  // row-major

  Cell& at(std::size_t row, std::size_t col) {
    return cells[row * col_names.size() + col];
  }
  const Cell& at(std::size_t row, std::size_t col) const {
    return cells[row * col_names.size() + col];
  }
  bool all_ok() const;
};

struct ClassifierConfig {
  ModelKind kind = ModelKind::kVq;
  int vq_bits = 6;            // "No" bits; codebook size 2^bits
  double cm_ridge_scale = 1e-6;
  FrontendConfig frontend = FrontendConfig::vq_preset();
};

struct ExperimentOptions {
  int cohort_size = 5;
  std::uint64_t master_seed = 1;
  int threads = 0;  // 0 = hardware concurrency
};

struct ExperimentResult {
  ResultTable identification;  // rate (%) per cell
  ResultTable eer;             // (with cohorts, without) per cell
  int failed_cells = 0;
};

namespace eval {

// 100 * correct / total.
double identification_rate(
    std::span<const std::pair<std::string, std::string>> decisions);

// The `size` models closest to the claimant's model, claimant excluded.
// Covariance models use the sphericity distance between model matrices; VQ
// models use each candidate codebook's distortion on the claimant's training
// features (which must be provided for VQ). Ties break by label order.
std::vector<std::string> select_cohort(const std::vector<SpeakerModel>& models,
                                       const std::string& claimant, int size,
                                       const FeatureSequence* claimant_train);

// raw - mean(cohort_scores).
double normalize_score(double raw, std::span<const double> cohort_scores);

// Equal error rate (%) under the accept-iff-score<=threshold convention,
// linearly interpolated between the two adjacent operating points where
// FAR - FRR changes sign.
double compute_eer(std::span<const double> client, std::span<const double> impostor);

// Runs every (chain, scenario) cell: enrolls on the train selection, scores
// the test selection for identification and verification, and fills both
// tables. A scenario missing a speaker's training data fails that cell but
// not the run. Deterministic given options.master_seed.
ExperimentResult run_experiment(const Manifest& manifest,
                                const std::vector<Scenario>& scenarios,
                                const std::vector<std::string>& chains,
                                const ClassifierConfig& classifier,
                                const ExperimentOptions& options);

// Machine output: full-precision CSV, one row per chain.
void write_identification_csv(const ResultTable& table, const std::string& path);
void write_eer_csv(const ResultTable& table, const std::string& path);

// Human output: aligned text table, one decimal place, optional decimal
// comma. EER cells render as "with / without".
std::string render_text_table(const ResultTable& table, const std::string& title,
                              bool decimal_comma);

}  // namespace eval
}  // namespace sprec

#endif  // SPREC_EVAL_HPP_
