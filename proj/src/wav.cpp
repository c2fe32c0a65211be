// src/wav.cpp

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

#include "sprec/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

#include "sprec/util.hpp"

namespace sprec::wav {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void store32(unsigned char* p, std::uint32_t v) {
  p[0] = v & 0xFF;
  p[1] = (v >> 8) & 0xFF;
  p[2] = (v >> 16) & 0xFF;
  p[3] = (v >> 24) & 0xFF;
}

void store16(unsigned char* p, std::uint16_t v) {
  p[0] = v & 0xFF;
  p[1] = (v >> 8) & 0xFF;
}

}  // namespace

AudioClip read(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DataError("cannot open audio file " + path);

  unsigned char header[12];
  if (std::fread(header, 1, sizeof header, f.get()) != sizeof header ||
      std::memcmp(header, "RIFF", 4) != 0 || std::memcmp(header + 8, "WAVE", 4) != 0) {
    throw DataError(path + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::vector<std::int16_t> pcm;
  bool have_data = false;

  unsigned char chunk[8];
  while (std::fread(chunk, 1, sizeof chunk, f.get()) == sizeof chunk) {
    const std::uint32_t size = le32(chunk + 4);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      std::vector<unsigned char> body(size);
      if (std::fread(body.data(), 1, size, f.get()) != size || size < 16) {
        throw DataError(path + ": malformed fmt chunk");
      }
      format = le16(body.data());
      channels = le16(body.data() + 2);
      rate = le32(body.data() + 4);
      bits = le16(body.data() + 14);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      pcm.resize(size / 2);
      if (std::fread(pcm.data(), 1, size, f.get()) < size) {
        throw DataError(path + ": truncated data chunk");
      }
      have_data = true;
    } else {
      // Skip unknown chunks (word-aligned).
      if (std::fseek(f.get(), static_cast<long>(size + (size & 1)), SEEK_CUR) != 0) {
        throw DataError(path + ": malformed chunk layout");
      }
      continue;
    }
    if (size & 1) std::fseek(f.get(), 1, SEEK_CUR);
  }
  if (!have_fmt || !have_data) throw DataError(path + ": missing fmt or data chunk");
  if (format != 1) throw DataError(path + ": only PCM encoding supported");
  if (channels != 1) {
    throw DataError(str_printf("%s: %u channels, only mono supported",
                               path.c_str(), channels));
  }
  if (bits != 16) {
    throw DataError(str_printf("%s: %u-bit samples, only 16-bit supported",
                               path.c_str(), bits));
  }
  if (rate != 8000 && rate != 16000) {
    throw DataError(str_printf("%s: sample rate %u, expected 8000 or 16000",
                               path.c_str(), rate));
  }

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(rate);
  clip.samples.resize(pcm.size());
  for (std::size_t i = 0; i < pcm.size(); ++i) {
    clip.samples[i] = static_cast<double>(pcm[i]) / 32768.0;
  }
  return clip;
}

void write(const std::string& path, const AudioClip& clip) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
  if (!f) throw DataError("cannot open " + path + " for writing");

  const std::uint32_t data_bytes = static_cast<std::uint32_t>(clip.samples.size() * 2);
  unsigned char header[44];
  std::memcpy(header, "RIFF", 4);
  store32(header + 4, 36 + data_bytes);
  std::memcpy(header + 8, "WAVE", 4);
  std::memcpy(header + 12, "fmt ", 4);
  store32(header + 16, 16);
  store16(header + 20, 1);  // PCM
  store16(header + 22, 1);  // mono
  store32(header + 24, static_cast<std::uint32_t>(clip.sample_rate_hz));
  store32(header + 28, static_cast<std::uint32_t>(clip.sample_rate_hz * 2));
  store16(header + 32, 2);
  store16(header + 34, 16);
  std::memcpy(header + 36, "data", 4);
  store32(header + 40, data_bytes);
  if (std::fwrite(header, 1, sizeof header, f.get()) != sizeof header) {
    throw DataError("short write to " + path);
  }

  std::vector<std::int16_t> pcm(clip.samples.size());
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const double clamped = std::clamp(clip.samples[i], -1.0, 1.0);
    pcm[i] = static_cast<std::int16_t>(
        std::lround(clamped * 32767.0));
  }
  if (std::fwrite(pcm.data(), 1, pcm.size() * 2, f.get()) != pcm.size() * 2) {
    throw DataError("short write to " + path);
  }
}

}  // namespace sprec::wav
