// include/sprec/transforms.hpp

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

#ifndef SPREC_TRANSFORMS_HPP_
#define SPREC_TRANSFORMS_HPP_

#include <span>
#include <string>
#include <vector>

#include "sprec/frontend.hpp"

namespace sprec {

// Inverse per-coefficient standard deviations fitted on a training corpus.
struct SigmaWeights {
  std::vector<double> w;

  bool fitted() const { return !w.empty(); }
};

struct PostfilterParams {
  double alpha = 1.0;
  double beta = 0.9;

  void validate() const;  // requires 0 < beta < alpha <= 1
};

enum class StepKind {
  kDropLow2,        // remove c_1, c_2
  kCms,             // per-utterance cepstral mean subtraction
  kAcw,             // adaptive component weighting (from per-frame LPC)
  kLinearWeight,    // c_n -> n * c_n
  kBandpassLifter,  // c_n -> (1 + h/2 sin(pi n / L)) * c_n
  kSigma,           // c_n -> c_n / sigma_n (fitted)
  kPostfilter,      // c_n -> (alpha^n - beta^n) * c_n
};

struct ChainStep {
  StepKind kind;
  PostfilterParams pf;  // kPostfilter only
  int bpl_len = 0;      // kBandpassLifter; 0 means "use the vector dimension"
  double bpl_h = -1.0;  // negative means "use L"
};

// Ordered parameterization recipe. Parsed from the table names used in
// configs and result rows: tokens joined by '+', e.g. "CMS+ACW+SIGMA".
// Recognized tokens: LPCC (identity), LPCC3P, CMS, ACW, LW, BPL, SIGMA, PF,
// plus the spelling "CMS-LW" for the CMS + linear-weighting combination.
// ACW is a re-parameterization computed from LPC polynomials rather than
// from cepstra, so when present it is moved to the front of the chain:
// "CMS+ACW" computes ACW cepstra first and then applies CMS over them.
class TransformChain {
 public:
  TransformChain() = default;

  static TransformChain parse(const std::string& name);  // throws ConfigError

  const std::vector<ChainStep>& steps() const { return steps_; }
  // Canonical token string in execution order ("LPCC" for the empty chain).
  std::string name() const;

  bool has_sigma() const;
  bool has_acw() const;

 private:
  explicit TransformChain(std::vector<ChainStep> steps);
  std::vector<ChainStep> steps_;
};

namespace transforms {

// c_3..c_Q (dimension Q-2). Requires Q >= 3.
FeatureSequence drop_low2(const FeatureSequence& seq);

// Subtracts the per-utterance mean vector; column means of the result are 0.
FeatureSequence cms(const FeatureSequence& seq);

// Adaptive component weighted cepstrum. Per frame with inverse filter
// A(z) = 1 + sum a_k z^-k, the numerator N(z) = sum_i prod_{j != i}
// (1 - p_j z^-1) over the poles p_i of A satisfies the closed form
// N(u) = P * A(u) - u * A'(u) in u = z^-1, so it is assembled directly from
// the LPC coefficients. The output is the cepstrum of N(z)/A(z): the plain
// LPCC plus the cepstrum of the monic-normalized numerator (a numerator
// polynomial contributes with opposite sign to the same recursion).
FeatureSequence acw(const Matrix& lpc_frames, int q);

// c_n -> n * c_n (positional index within the current vector).
FeatureSequence linear_weight(const FeatureSequence& seq);

// Bandpass lifter with window length l (must equal the vector dimension;
// 0 selects it automatically) and height h (negative selects h = l).
FeatureSequence bandpass_lifter(const FeatureSequence& seq, int l, double h);

// Pooled per-coefficient population standard deviations over all frames of
// all sequences; weights are 1/max(sigma, 1e-8).
SigmaWeights sigma_fit(std::span<const FeatureSequence> corpus);

FeatureSequence sigma_apply(const FeatureSequence& seq, const SigmaWeights& w);

FeatureSequence postfilter_weight(const FeatureSequence& seq, PostfilterParams p);

// Applies the chain to one utterance. `input` carries both the LPCC features
// and the per-frame LPC so that ACW chains can re-parameterize from poles.
// `sigma` must be fitted (see fit_chain_sigma) when the chain contains a
// SIGMA step, and may be null otherwise.
FeatureSequence apply_chain(const TransformChain& chain,
                            const frontend::ExtractResult& input,
                            const SigmaWeights* sigma = nullptr);

// Fits the SIGMA step of `chain` on a training corpus: the steps before
// SIGMA are applied to every utterance and the weights are fitted on the
// pooled result. Returns unfitted weights when the chain has no SIGMA step.
SigmaWeights fit_chain_sigma(const TransformChain& chain,
                             std::span<const frontend::ExtractResult> corpus);

}  // namespace transforms
}  // namespace sprec

#endif  // SPREC_TRANSFORMS_HPP_
