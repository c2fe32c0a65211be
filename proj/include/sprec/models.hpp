// include/sprec/models.hpp

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

#ifndef SPREC_MODELS_HPP_
#define SPREC_MODELS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sprec/frontend.hpp"
#include "sprec/linalg.hpp"
#include "sprec/transforms.hpp"

namespace sprec {

// Codebook of 2^bits codewords copied from training frames.
struct VqCodebook {
  Matrix codewords;  // K x Q
  int bits = 6;
  std::uint64_t seed = 0;
};

// Mean-removed covariance of the training frames plus a ridge.
struct CovarianceModel {
  Matrix c;  // Q x Q, symmetric positive definite
  std::vector<double> mean;
  double ridge = 0.0;
};

enum class ModelKind { kVq, kCm };

std::string model_kind_name(ModelKind k);

struct SpeakerModel {
  std::string id;
  ModelKind kind = ModelKind::kVq;
  VqCodebook vq;        // kind == kVq
  CovarianceModel cm;   // kind == kCm
  std::string chain_name;  // parameterization used at enrollment
  SigmaWeights sigma;      // fitted weights when the chain has a SIGMA step
};

namespace models {

// Random-method codebook: 2^bits distinct training rows drawn without
// replacement with a seeded generator. Requires T >= 2^bits.
VqCodebook train_vq_random(const FeatureSequence& features, int bits,
                           std::uint64_t seed);

// Average nearest-codeword squared-Euclidean distortion; lower is better.
double vq_score(const VqCodebook& cb, const FeatureSequence& seq);

// C = (1/T) sum (x - mu)(x - mu)^T + ridge * I. Requires T >= 2 and the
// result to be positive definite.
CovarianceModel train_cov(const FeatureSequence& features, double ridge);

// ridge_scale * tr(C0) / Q for the raw covariance C0 of `features`; the
// default scale keeps short test utterances invertible at Q = 20.
CovarianceModel train_cov_relative(const FeatureSequence& features,
                                   double ridge_scale = 1e-6);

// Arithmetic-harmonic sphericity:
//   d(Cj, Ct) = log[ tr(Ct Cj^-1) tr(Cj Ct^-1) / 2 ] - 2 log(P).
// Symmetric; equals -log 2 when the matrices are proportional.
double sphericity(const CovarianceModel& model, const CovarianceModel& test);

// Constant-free variant log[ tr(Ct Cj^-1) tr(Cj Ct^-1) ]. Differs from
// sphericity() by an additive constant, so rankings are identical; kept as
// an independent route for ranking checks.
double sphericity_log_trace(const CovarianceModel& model,
                            const CovarianceModel& test);

// Distance of `seq` to every model, in the models' order. For covariance
// models the test-side covariance is computed once and reused.
std::vector<double> score_all(const std::vector<SpeakerModel>& models,
                              const FeatureSequence& seq);

// Closed-set identification: label of the lowest-scoring model, ties broken
// by lexicographically smallest label.
std::string identify(const std::vector<SpeakerModel>& models,
                     const FeatureSequence& seq);

// Raw verification score of one claim (lower = accept-leaning).
double verify_score(const SpeakerModel& model, const FeatureSequence& seq);

// Versioned binary container; round-trips bit-exactly on the writing host.
void save_model(const std::string& path, const SpeakerModel& model);
SpeakerModel load_model(const std::string& path);

}  // namespace models
}  // namespace sprec

#endif  // SPREC_MODELS_HPP_
