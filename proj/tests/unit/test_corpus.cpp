// tests/unit/test_corpus.cpp

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

#include "sprec/corpus.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sprec/frontend.hpp"
#include "sprec/wav.hpp"
#include "support/test_support.hpp"

namespace fs = std::filesystem;
using namespace sprec;
using namespace sprec::corpus;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<char> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("manifest round trip is lossless") {
  TempDir dir("sprec_manifest_test");
  const fs::path wav_path = dir.path / "a.wav";
  AudioClip clip;
  clip.samples.assign(160, 0.1);
  wav::write(wav_path.string(), clip);

  std::vector<UtteranceRecord> records;
  for (int i = 0; i < 3; ++i) {
    UtteranceRecord rec;
    rec.key = {"spk00", "S1", "M1", "c", i == 0 ? Role::kTrain : Role::kTest, i};
    rec.path = "a.wav";
    rec.duration_s = 2.0 + 0.125 * i;
    records.push_back(rec);
  }
  const fs::path manifest_path = dir.path / "manifest.tsv";
  save_manifest(manifest_path.string(), records);
  const Manifest loaded = load_manifest(manifest_path.string());
  REQUIRE(loaded.records.size() == 3);
  CHECK(loaded.records == records);
  CHECK(loaded.speakers() == std::vector<std::string>{"spk00"});
}

TEST_CASE("manifest validation") {
  TempDir dir("sprec_manifest_bad");

  SUBCASE("empty file loads as an empty manifest") {
    const fs::path p = dir.path / "empty.tsv";
    std::ofstream(p).close();
    CHECK(load_manifest(p.string()).records.empty());
  }

  SUBCASE("duplicate keys are rejected by name") {
    const fs::path wav_path = dir.path / "a.wav";
    AudioClip clip;
    clip.samples.assign(160, 0.1);
    wav::write(wav_path.string(), clip);
    const fs::path p = dir.path / "dup.tsv";
    std::ofstream out(p);
    out << "speaker\tsession\tmicrophone\tlanguage\trole\tindex\tpath\tduration\n";
    out << "spk00\tS1\tM1\tc\ttrain\t0\ta.wav\t2\n";
    out << "spk00\tS1\tM1\tc\ttest\t0\ta.wav\t2\n";  // same key, different role
    out.close();
    CHECK_THROWS_WITH_AS(load_manifest(p.string()), doctest::Contains("spk00"),
                         DataError);
  }

  SUBCASE("missing audio file is rejected with its path") {
    const fs::path p = dir.path / "missing.tsv";
    std::ofstream out(p);
    out << "speaker\tsession\tmicrophone\tlanguage\trole\tindex\tpath\tduration\n";
    out << "spk00\tS1\tM1\tc\ttrain\t0\tnot_there.wav\t2\n";
    out.close();
    CHECK_THROWS_WITH_AS(load_manifest(p.string()),
                         doctest::Contains("not_there.wav"), DataError);
  }

  SUBCASE("malformed rows carry line numbers") {
    const fs::path p = dir.path / "short.tsv";
    std::ofstream out(p);
    out << "speaker\tsession\tmicrophone\tlanguage\trole\tindex\tpath\tduration\n";
    out << "spk00\tS1\tM1\n";
    out.close();
    CHECK_THROWS_WITH_AS(load_manifest(p.string()), doctest::Contains(":2"),
                         DataError);
  }
}

TEST_CASE("wav decode rejects what it cannot represent") {
  TempDir dir("sprec_wav_test");

  SUBCASE("8 kHz round trip preserves length and values") {
    AudioClip clip;
    clip.samples.resize(321);
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
      clip.samples[i] = 0.5 * std::sin(0.01 * static_cast<double>(i));
    }
    const fs::path p = dir.path / "mono8k.wav";
    wav::write(p.string(), clip);
    const AudioClip back = decode_audio(p.string());
    CHECK(back.sample_rate_hz == 8000);
    REQUIRE(back.samples.size() == clip.samples.size());
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
      CHECK(std::abs(back.samples[i] - clip.samples[i]) < 1e-4);  // PCM16 step
    }
  }

  SUBCASE("16 kHz input decimates 2:1") {
    AudioClip clip;
    clip.sample_rate_hz = 16000;
    clip.samples.assign(2000, 0.25);
    const fs::path p = dir.path / "mono16k.wav";
    wav::write(p.string(), clip);
    const AudioClip back = decode_audio(p.string());
    CHECK(back.sample_rate_hz == 8000);
    CHECK(back.samples.size() == 1000);
  }

  SUBCASE("square wave keeps the energy of its band-limited part") {
    AudioClip clip;
    clip.sample_rate_hz = 16000;
    const std::size_t n = 8192;
    clip.samples.resize(n);
    // 400 Hz square wave at 16 kHz: 20 samples high, 20 low.
    for (std::size_t i = 0; i < n; ++i) {
      clip.samples[i] = (i / 20) % 2 == 0 ? 0.9 : -0.9;
    }
    const fs::path p = dir.path / "square.wav";
    wav::write(p.string(), clip);
    const AudioClip decimated = decode_audio(p.string());

    // Brick-wall oracle: zero every DFT bin above 4 kHz, Parseval the rest.
    std::vector<std::complex<double>> spec(clip.samples.begin(), clip.samples.end());
    spec = sprec::testing::fft(std::move(spec));
    double band_energy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t mirrored = std::min(k, n - k);
      if (mirrored <= n / 4) band_energy += std::norm(spec[k]);
    }
    const double oracle_power = band_energy / (static_cast<double>(n) * n);

    double decimated_power = 0.0;
    for (double s : decimated.samples) decimated_power += s * s;
    decimated_power /= static_cast<double>(decimated.samples.size());
    CHECK(std::abs(decimated_power - oracle_power) < 0.05 * oracle_power);
  }

  SUBCASE("stereo is rejected") {
    // Hand-build a 44-byte stereo header with no samples.
    unsigned char hdr[44] = {0};
    std::memcpy(hdr, "RIFF", 4);
    hdr[4] = 36;
    std::memcpy(hdr + 8, "WAVEfmt ", 8);
    hdr[16] = 16;
    hdr[20] = 1;
    hdr[22] = 2;  // channels
    hdr[24] = 0x40;
    hdr[25] = 0x1F;  // 8000
    hdr[32] = 4;
    hdr[34] = 16;
    std::memcpy(hdr + 36, "data", 4);
    const fs::path p = dir.path / "stereo.wav";
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    out.close();
    CHECK_THROWS_WITH_AS(decode_audio(p.string()), doctest::Contains("mono"),
                         DataError);
  }

  SUBCASE("unsupported rate is rejected") {
    unsigned char hdr[44] = {0};
    std::memcpy(hdr, "RIFF", 4);
    hdr[4] = 36;
    std::memcpy(hdr + 8, "WAVEfmt ", 8);
    hdr[16] = 16;
    hdr[20] = 1;
    hdr[22] = 1;
    hdr[24] = 0x44;
    hdr[25] = 0xAC;  // 44100
    hdr[32] = 2;
    hdr[34] = 16;
    std::memcpy(hdr + 36, "data", 4);
    const fs::path p = dir.path / "badrate.wav";
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
    out.close();
    CHECK_THROWS_WITH_AS(decode_audio(p.string()), doctest::Contains("8000"),
                         DataError);
  }
}

TEST_CASE("synthetic utterances") {
  const SynthSpeaker spk = make_synth_speaker("spk", 70, 10);
  CHECK(spk.ar_coeffs.size() == 10);
  for (const std::complex<double>& p : spk.poles) CHECK(std::abs(p) <= 0.95);

  const AudioClip two_seconds = synth_utterance(spk, 2.0, 5);
  CHECK(two_seconds.samples.size() == 16000);

  const AudioClip again = synth_utterance(spk, 2.0, 5);
  CHECK(two_seconds.samples == again.samples);
  const AudioClip other = synth_utterance(spk, 2.0, 6);
  CHECK(two_seconds.samples != other.samples);
}

TEST_CASE("synthetic speakers match their generating filter") {
  const SynthSpeaker spk = make_synth_speaker("spk", 71, 10);
  const AudioClip x = synth_utterance(spk, 60.0, 7);

  FrontendConfig cfg = FrontendConfig::cm_preset();
  cfg.preemphasis = 0.0;
  const frontend::ExtractResult fr = frontend::extract(x, cfg);
  const std::vector<double> target =
      frontend::lpc_to_lpcc(spk.ar_coeffs, cfg.cepstrum_order);
  double l2 = 0.0;
  for (std::size_t n = 0; n < target.size(); ++n) {
    double mean = 0.0;
    for (std::size_t t = 0; t < fr.features.frames(); ++t) {
      mean += fr.features.vectors(t, n);
    }
    mean /= static_cast<double>(fr.features.frames());
    l2 += (mean - target[n]) * (mean - target[n]);
  }
  CHECK(std::sqrt(l2) < 0.1);
}

TEST_CASE("distinct speakers stay apart in cepstrum space") {
  std::vector<SynthSpeaker> speakers;
  for (int i = 0; i < 6; ++i) {
    speakers.push_back(make_synth_speaker(
        str_printf("spk%02d", i), 100 + static_cast<std::uint64_t>(i), 10));
  }
  double min_distance = INFINITY;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    for (std::size_t j = i + 1; j < speakers.size(); ++j) {
      const std::vector<double> a = frontend::lpc_to_lpcc(speakers[i].ar_coeffs, 20);
      const std::vector<double> b = frontend::lpc_to_lpcc(speakers[j].ar_coeffs, 20);
      double d = 0.0;
      for (std::size_t n = 0; n < a.size(); ++n) d += (a[n] - b[n]) * (a[n] - b[n]);
      min_distance = std::min(min_distance, std::sqrt(d));
    }
  }
  CHECK(min_distance > 0.0);
}

TEST_CASE("channel application is causal convolution") {
  AudioClip clip;
  clip.samples = {1.0, 0.5, -0.25, 0.0, 0.125, 0.75, -0.5, 0.3};

  SUBCASE("M1 is bit-identical") {
    const AudioClip out = apply_channel(clip, "M1");
    CHECK(out.samples == clip.samples);
  }

  SUBCASE("impulse reproduces the taps") {
    AudioClip impulse;
    impulse.samples.assign(8, 0.0);
    impulse.samples[0] = 1.0;
    const AudioClip out = apply_channel(impulse, "M3");
    const std::vector<double> taps = channel_taps("M3");
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      CHECK(out.samples[i] == doctest::Approx(i < taps.size() ? taps[i] : 0.0));
    }
  }

  SUBCASE("double application equals the squared-response FIR") {
    const std::vector<double> taps = channel_taps("M3");
    std::vector<double> squared(taps.size() * 2 - 1, 0.0);
    for (std::size_t i = 0; i < taps.size(); ++i) {
      for (std::size_t j = 0; j < taps.size(); ++j) squared[i + j] += taps[i] * taps[j];
    }
    const AudioClip twice = apply_channel(apply_channel(clip, "M3"), "M3");
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
      double expected = 0.0;
      for (std::size_t k = 0; k < squared.size() && k <= i; ++k) {
        expected += squared[k] * clip.samples[i - k];
      }
      CHECK(std::abs(twice.samples[i] - expected) < 1e-10);
    }
  }

  SUBCASE("unknown channels are rejected") {
    CHECK_THROWS_AS(apply_channel(clip, "M9"), DataError);
  }
}

TEST_CASE("synthetic corpus generation") {
  TempDir dir("sprec_corpus_test");

  SynthCorpusParams params;
  params.out_dir = (dir.path / "c1").string();
  params.n_speakers = 2;
  params.sessions = {"S1", "S2"};
  params.channels = {"M1"};
  params.languages = {"c", "s"};
  params.train_duration_s = 1.2;
  params.test_duration_s = 0.5;
  params.tests_per_condition = 5;
  params.master_seed = 123;

  const Manifest manifest = build_synth_corpus(params);
  // speakers x sessions x languages x (1 train + 5 test) x channels
  CHECK(manifest.records.size() == 2 * 2 * 2 * 6 * 1);

  int train_count = 0;
  for (const UtteranceRecord& rec : manifest.records) {
    if (rec.key.role == Role::kTrain) {
      ++train_count;
      CHECK(rec.duration_s == doctest::Approx(1.2));
    } else {
      CHECK(rec.duration_s == doctest::Approx(0.5));
    }
  }
  CHECK(train_count == 2 * 2 * 2);

  SUBCASE("two channels double the record count") {
    SynthCorpusParams two = params;
    two.out_dir = (dir.path / "c2").string();
    two.channels = {"M1", "M3"};
    two.languages = {"c"};
    two.n_speakers = 2;
    two.sessions = {"S1"};
    const Manifest m2 = build_synth_corpus(two);
    CHECK(m2.records.size() == 2 * 1 * 1 * 6 * 2);
  }

  SUBCASE("same master seed reproduces the corpus byte for byte") {
    SynthCorpusParams again = params;
    again.out_dir = (dir.path / "c3").string();
    build_synth_corpus(again);
    SynthCorpusParams thrice = params;
    thrice.out_dir = (dir.path / "c4").string();
    build_synth_corpus(thrice);

    CHECK(read_bytes(dir.path / "c3" / "manifest.tsv") ==
          read_bytes(dir.path / "c4" / "manifest.tsv"));
    const std::string sample = "audio/spk01_S2_M1_s_test3.wav";
    CHECK(read_bytes(dir.path / "c3" / sample) == read_bytes(dir.path / "c4" / sample));
  }
}
