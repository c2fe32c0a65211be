// include/sprec/wav.hpp

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

#ifndef SPREC_WAV_HPP_
#define SPREC_WAV_HPP_

#include <string>

#include "sprec/audio.hpp"

namespace sprec::wav {

// Reads a mono 16-bit PCM WAV file. Anything else (stereo, other codecs,
// other sample widths) is rejected with a reason. Samples are scaled by
// 1/32768 into [-1, 1).
AudioClip read(const std::string& path);

// Writes mono 16-bit PCM. Samples are clamped to [-1, 1] first.
void write(const std::string& path, const AudioClip& clip);

}  // namespace sprec::wav

#endif  // SPREC_WAV_HPP_
