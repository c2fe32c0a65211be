// include/sprec/audio.hpp

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

#ifndef SPREC_AUDIO_HPP_
#define SPREC_AUDIO_HPP_

#include <vector>

namespace sprec {

// Mono audio, nominal amplitude range [-1, 1]. All recognition-path
// processing assumes 8 kHz; 16 kHz material is decimated at decode time.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = 8000;

  double duration_s() const {
    return sample_rate_hz > 0
               ? static_cast<double>(samples.size()) / sample_rate_hz
               : 0.0;
  }
};

}  // namespace sprec

#endif  // SPREC_AUDIO_HPP_
