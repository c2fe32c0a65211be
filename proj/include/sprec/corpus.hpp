// include/sprec/corpus.hpp

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

#ifndef SPREC_CORPUS_HPP_
#define SPREC_CORPUS_HPP_

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "sprec/audio.hpp"
#include "sprec/keys.hpp"
#include "sprec/util.hpp"

namespace sprec {

struct UtteranceRecord {
  ConditionKey key;
  std::string path;  // relative to the manifest directory
  double duration_s = 0.0;

  friend bool operator==(const UtteranceRecord&, const UtteranceRecord&) = default;
};

struct Manifest {
  std::vector<UtteranceRecord> records;
  std::string base_dir;  // directory the paths are resolved against

  std::string resolve(const UtteranceRecord& rec) const;
  std::vector<std::string> speakers() const;  // sorted unique labels
};

// Synthetic AR source standing in for one speaker. A speaker owns one or
// more AR "phoneme states"; utterances switch between them every few hundred
// milliseconds. A single-state speaker is a stationary source whose poles
// are the exact ground truth the generator-filter oracles compare against
// (poles/ar_coeffs alias state 0). Multi-state speakers keep mean-removed
// features speaker-specific, which stationary sources cannot.
struct SynthSpeaker {
  std::string id;
  std::vector<std::complex<double>> poles;  // state 0
  std::vector<double> ar_coeffs;            // state 0 expansion
  std::vector<std::vector<std::complex<double>>> state_poles;
  std::vector<std::vector<double>> state_ar;
  std::uint64_t seed = 0;
};

namespace corpus {

// Tab-separated manifest with a header row:
// speaker session microphone language role index path duration.
// Duplicate (speaker, session, microphone, language, index) keys are
// rejected; referenced audio files must exist.
Manifest load_manifest(const std::string& path);
void save_manifest(const std::string& path,
                   const std::vector<UtteranceRecord>& records);

// Mono PCM16 WAV at 8 or 16 kHz; 16 kHz input is low-pass filtered and
// decimated 2:1.
AudioClip decode_audio(const std::string& path);

// Expands A(z) = prod (1 - p_i z^-1) and returns a_1..a_P (real parts;
// poles must come in conjugate pairs or be real).
std::vector<double> poles_to_ar(const std::vector<std::complex<double>>& poles);

// Random stable conjugate pole pairs, radii within [radius_lo, radius_hi].
std::vector<std::complex<double>> random_stable_poles(Prng& prng, int order,
                                                      double radius_lo,
                                                      double radius_hi);

// Deterministic AR(order) speaker derived from `seed`, with `n_states`
// independently drawn state filters.
SynthSpeaker make_synth_speaker(const std::string& id, std::uint64_t seed,
                                int order = 10, int n_states = 1);

// White-noise-excited all-pole realization at 8 kHz, deterministic per
// (spk.seed, utt_seed). Multi-state speakers switch filters every 120-280 ms.
// RMS-normalized to a fixed target level.
AudioClip synth_utterance(const SynthSpeaker& spk, double duration_s,
                          std::uint64_t utt_seed);

// Periodic on/off envelope; the "language" analog used by the generator.
AudioClip apply_duty_cycle(const AudioClip& clip, double on_s, double off_s);

// Convolution with the fixed FIR registered under channel_id ("M1" is the
// identity). Output length equals input length (causal, tail truncated).
AudioClip apply_channel(const AudioClip& clip, const std::string& channel_id);
std::vector<std::string> channel_ids();
std::vector<double> channel_taps(const std::string& channel_id);

struct SynthCorpusParams {
  int n_speakers = 8;
  std::vector<std::string> sessions = {"S1"};
  std::vector<std::string> channels = {"M1"};
  std::vector<std::string> languages = {"c"};
  double train_duration_s = 60.0;
  double test_duration_s = 2.0;
  int tests_per_condition = 5;
  std::uint64_t master_seed = 1;
  std::string out_dir;
  int speaker_ar_order = 10;
  int states_per_speaker = 4;  // phoneme-like variation within utterances
};

// Generates WAV files plus a manifest under params.out_dir and returns the
// loaded manifest. One train and tests_per_condition test utterances per
// (speaker, session, language); each microphone channel records the same
// underlying signal through its FIR. Session change jitters the pole radii
// by at most 0.02. Fully deterministic in master_seed.
Manifest build_synth_corpus(const SynthCorpusParams& params);

}  // namespace corpus
}  // namespace sprec

#endif  // SPREC_CORPUS_HPP_
