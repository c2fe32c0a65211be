// include/sprec/frontend.hpp

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

#ifndef SPREC_FRONTEND_HPP_
#define SPREC_FRONTEND_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sprec/audio.hpp"
#include "sprec/keys.hpp"
#include "sprec/linalg.hpp"

namespace sprec {

// Analysis settings for the LPC cepstral front end. The two presets match
// the classifier configurations used throughout: 16th-order vectors for the
// VQ system and 20th-order vectors for the covariance system.
struct FrontendConfig {
  double preemphasis = 0.95;
  int frame_len = 240;      // samples per frame (30 ms at 8 kHz)
  int frame_shift = 80;     // 2/3 overlap between adjacent frames
  int lpc_order = 16;       // P
  int cepstrum_order = 16;  // Q, must be >= P
  double energy_floor_db = 30.0;  // relative gate below the loudest frame

  static FrontendConfig vq_preset();  // P = Q = 16
  static FrontendConfig cm_preset();  // P = Q = 20

  void validate() const;  // throws ConfigError
};

// T x Q matrix of cepstral vectors c_1..c_Q, one row per retained frame.
struct FeatureSequence {
  Matrix vectors;
  ConditionKey meta;

  std::size_t frames() const { return vectors.rows(); }
  std::size_t dim() const { return vectors.cols(); }
};

struct LpcFrame {
  std::vector<double> coeffs;   // a_1..a_P of A(z) = 1 + sum a_k z^-k
  double residual_energy = 0.0;
};

namespace frontend {

// y[0] = x[0], y[n] = x[n] - coeff * x[n-1]. Rejects non-finite samples.
AudioClip preemphasize(const AudioClip& x, double coeff);

// Hamming-windowed frames, one per row. A signal shorter than one frame
// yields zero rows (with a warning).
Matrix frame_and_window(const AudioClip& x, const FrontendConfig& cfg);

// Keeps frames whose energy is within floor_db of the loudest frame.
Matrix energy_gate(const Matrix& frames, double floor_db);

// Biased autocorrelation r[0..order].
std::vector<double> autocorrelation(std::span<const double> frame, int order);

// Levinson-Durbin recursion on r[0..P]. Returns nullopt when the
// autocorrelation is not positive definite (degenerate frame).
std::optional<LpcFrame> levinson(std::span<const double> r);

// Cepstrum c_1..c_q of the all-pole model 1/A(z) (gain excluded).
std::vector<double> lpc_to_lpcc(std::span<const double> a, int q);

struct ExtractResult {
  FeatureSequence features;  // T x Q LPCC
  Matrix lpc;                // T x P, kept for pole-domain transforms
  int frames_total = 0;      // before gating
  int frames_gated = 0;
  int frames_degenerate = 0;  // dropped by the Levinson recursion
};

// Full pipeline: pre-emphasis, framing + window, energy gate, per-frame
// LPC and LPCC. Frames whose recursion degenerates are dropped and counted.
ExtractResult extract(const AudioClip& x, const FrontendConfig& cfg);

// Binary feature container used by the extract CLI command. Round-trips
// bit-exactly on the writing host.
void save_features(const std::string& path, const ExtractResult& fr);
ExtractResult load_features(const std::string& path);

}  // namespace frontend
}  // namespace sprec

#endif  // SPREC_FRONTEND_HPP_
