// src/corpus.cpp

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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sprec/frontend.hpp"
#include "sprec/wav.hpp"

namespace fs = std::filesystem;

namespace sprec {

std::string Manifest::resolve(const UtteranceRecord& rec) const {
  const fs::path p(rec.path);
  if (p.is_absolute() || base_dir.empty()) return rec.path;
  return (fs::path(base_dir) / p).string();
}

std::vector<std::string> Manifest::speakers() const {
  std::set<std::string> labels;
  for (const UtteranceRecord& rec : records) labels.insert(rec.key.speaker);
  return {labels.begin(), labels.end()};
}

namespace corpus {

namespace {

constexpr const char* kManifestHeader =
    "speaker\tsession\tmicrophone\tlanguage\trole\tindex\tpath\tduration";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(
        start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string uniqueness_key(const ConditionKey& k) {
  return k.speaker + '\t' + k.session + '\t' + k.microphone + '\t' + k.language +
         '\t' + std::to_string(k.index);
}

}  // namespace

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path);

  Manifest manifest;
  manifest.base_dir = fs::path(path).parent_path().string();

  std::string line;
  int line_no = 0;
  std::set<std::string> seen;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      if (line != kManifestHeader) {
        throw DataError(str_printf("%s:%d: bad header row (expected '%s')",
                                   path.c_str(), line_no, kManifestHeader));
      }
      have_header = true;
      continue;
    }
    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != 8) {
      throw DataError(str_printf("%s:%d: expected 8 tab-separated fields, got %zu",
                                 path.c_str(), line_no, fields.size()));
    }
    UtteranceRecord rec;
    rec.key.speaker = fields[0];
    rec.key.session = fields[1];
    rec.key.microphone = fields[2];
    rec.key.language = fields[3];
    for (int i = 0; i < 4; ++i) {
      if (fields[i].empty()) {
        throw DataError(str_printf("%s:%d: empty condition field", path.c_str(), line_no));
      }
    }
    try {
      rec.key.role = parse_role(fields[4]);
    } catch (const DataError& e) {
      throw DataError(str_printf("%s:%d: %s", path.c_str(), line_no, e.what()));
    }
    try {
      rec.key.index = std::stoi(fields[5]);
      rec.duration_s = std::stod(fields[7]);
    } catch (const std::exception&) {
      throw DataError(str_printf("%s:%d: bad numeric field", path.c_str(), line_no));
    }
    if (!(rec.duration_s > 0.0)) {
      throw DataError(str_printf("%s:%d: duration must be positive", path.c_str(), line_no));
    }
    rec.path = fields[6];
    if (rec.path.empty()) {
      throw DataError(str_printf("%s:%d: empty path", path.c_str(), line_no));
    }
    if (!seen.insert(uniqueness_key(rec.key)).second) {
      throw DataError(str_printf("%s:%d: duplicate utterance key %s", path.c_str(),
                                 line_no, rec.key.to_string().c_str()));
    }
    manifest.records.push_back(std::move(rec));
  }
  if (!have_header && !manifest.records.empty()) {
    throw DataError(path + ": missing header row");
  }

  for (const UtteranceRecord& rec : manifest.records) {
    const std::string full = manifest.resolve(rec);
    if (!fs::exists(full)) {
      throw DataError("manifest references missing audio file " + full);
    }
  }
  return manifest;
}

void save_manifest(const std::string& path,
                   const std::vector<UtteranceRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << kManifestHeader << '\n';
  for (const UtteranceRecord& rec : records) {
    out << rec.key.speaker << '\t' << rec.key.session << '\t' << rec.key.microphone
        << '\t' << rec.key.language << '\t' << role_name(rec.key.role) << '\t'
        << rec.key.index << '\t' << rec.path << '\t'
        << str_printf("%.17g", rec.duration_s) << '\n';
  }
  if (!out) throw DataError("short write to " + path);
}

namespace {

// 63-tap Hamming-windowed sinc, cutoff at a quarter of the input rate.
std::vector<double> decimation_lowpass() {
  constexpr int kTaps = 63;
  constexpr double kCutoff = 0.25;  // fraction of the input sample rate
  std::vector<double> h(kTaps);
  const int mid = kTaps / 2;
  double sum = 0.0;
  for (int i = 0; i < kTaps; ++i) {
    const int n = i - mid;
    const double sinc =
        n == 0 ? 2.0 * kCutoff : std::sin(2.0 * M_PI * kCutoff * n) / (M_PI * n);
    const double window = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (kTaps - 1));
    h[i] = sinc * window;
    sum += h[i];
  }
  for (double& v : h) v /= sum;  // unity DC gain
  return h;
}

// Zero-padded convolution evaluated at the input grid, centered on the
// filter's group delay so decimation keeps time alignment.
std::vector<double> convolve_centered(const std::vector<double>& x,
                                      const std::vector<double>& h) {
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(h.size());
  const int mid = m / 2;
  std::vector<double> y(x.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
      const int j = i - k + mid;
      if (j >= 0 && j < n) acc += h[k] * x[j];
    }
    y[i] = acc;
  }
  return y;
}

}  // namespace

AudioClip decode_audio(const std::string& path) {
  AudioClip clip = wav::read(path);
  if (clip.sample_rate_hz == 8000) return clip;

  // 16 kHz: anti-alias low-pass, then keep every second sample.
  static const std::vector<double> lowpass = decimation_lowpass();
  const std::vector<double> filtered = convolve_centered(clip.samples, lowpass);
  AudioClip out;
  out.sample_rate_hz = 8000;
  out.samples.reserve(filtered.size() / 2 + 1);
  for (std::size_t i = 0; i < filtered.size(); i += 2) {
    out.samples.push_back(filtered[i]);
  }
  return out;
}

std::vector<double> poles_to_ar(const std::vector<std::complex<double>>& poles) {
  std::vector<std::complex<double>> coeffs = {1.0};
  for (const std::complex<double>& p : poles) {
    coeffs.push_back(0.0);
    for (std::size_t k = coeffs.size() - 1; k >= 1; --k) {
      coeffs[k] -= p * coeffs[k - 1];
    }
  }
  std::vector<double> a(coeffs.size() - 1);
  for (std::size_t k = 1; k < coeffs.size(); ++k) {
    if (std::abs(coeffs[k].imag()) > 1e-9) {
      throw std::invalid_argument(
          "poles_to_ar: poles must be real or in conjugate pairs");
    }
    a[k - 1] = coeffs[k].real();
  }
  return a;
}

std::vector<std::complex<double>> random_stable_poles(Prng& prng, int order,
                                                      double radius_lo,
                                                      double radius_hi) {
  if (order < 1) throw std::invalid_argument("random_stable_poles: order must be >= 1");
  std::vector<std::complex<double>> poles;
  poles.reserve(static_cast<std::size_t>(order));
  int remaining = order;
  while (remaining >= 2) {
    const double radius = prng.uniform(radius_lo, radius_hi);
    const double angle = prng.uniform(0.08 * M_PI, 0.92 * M_PI);
    poles.push_back(std::polar(radius, angle));
    poles.push_back(std::polar(radius, -angle));
    remaining -= 2;
  }
  if (remaining == 1) {
    poles.push_back(prng.uniform(radius_lo, radius_hi));
  }
  return poles;
}

namespace {

std::vector<std::complex<double>> perturb_poles(
    const std::vector<std::complex<double>>& poles, Prng& prng);

}  // namespace

SynthSpeaker make_synth_speaker(const std::string& id, std::uint64_t seed,
                                int order, int n_states) {
  if (n_states < 1) {
    throw std::invalid_argument("make_synth_speaker: n_states must be >= 1");
  }
  Prng prng(seed);
  SynthSpeaker spk;
  spk.id = id;
  spk.seed = seed;
  // State 0 is the base filter; further states are phoneme-like variants of
  // it, so one speaker's states cluster around a common spectral shape.
  spk.state_poles.push_back(random_stable_poles(prng, order, 0.55, 0.89));
  spk.state_ar.push_back(poles_to_ar(spk.state_poles.back()));
  for (int s = 1; s < n_states; ++s) {
    spk.state_poles.push_back(perturb_poles(spk.state_poles.front(), prng));
    spk.state_ar.push_back(poles_to_ar(spk.state_poles.back()));
  }
  spk.poles = spk.state_poles.front();
  spk.ar_coeffs = spk.state_ar.front();
  return spk;
}

AudioClip synth_utterance(const SynthSpeaker& spk, double duration_s,
                          std::uint64_t utt_seed) {
  constexpr int kRate = 8000;
  constexpr int kBurnIn = 1000;
  const std::size_t n = static_cast<std::size_t>(std::llround(duration_s * kRate));
  std::vector<const std::vector<double>*> states;
  if (spk.state_ar.empty()) {
    states.push_back(&spk.ar_coeffs);
  } else {
    for (const std::vector<double>& s : spk.state_ar) states.push_back(&s);
  }

  // Per-state excitation gains equalizing the output power, so the energy
  // gate treats all states alike. LPC itself is gain-invariant.
  std::vector<double> gain(states.size());
  for (std::size_t s = 0; s < states.size(); ++s) {
    const std::vector<double>& a = *states[s];
    std::vector<double> h(2000, 0.0);
    double energy = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      double acc = i == 0 ? 1.0 : 0.0;
      for (std::size_t k = 1; k <= a.size() && k <= i; ++k) {
        acc -= a[k - 1] * h[i - k];
      }
      h[i] = acc;
      energy += acc * acc;
    }
    gain[s] = 1.0 / std::sqrt(energy);
  }

  Prng prng(mix_seed({spk.seed, utt_seed}));
  std::vector<double> y(n + kBurnIn, 0.0);
  std::size_t state = 0;
  std::size_t next_switch = y.size();
  if (states.size() > 1) {
    state = prng.uniform_index(states.size());
    next_switch = kBurnIn + prng.uniform_index(641) + 480;  // 60-140 ms
  }
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i >= next_switch) {
      state = prng.uniform_index(states.size());
      next_switch = i + prng.uniform_index(641) + 480;
    }
    const std::vector<double>& a = *states[state];
    double acc = gain[state] * prng.normal();
    for (std::size_t k = 1; k <= a.size() && k <= i; ++k) {
      acc -= a[k - 1] * y[i - k];
    }
    y[i] = acc;
  }

  AudioClip clip;
  clip.sample_rate_hz = kRate;
  clip.samples.assign(y.begin() + kBurnIn, y.end());

  // Normalize to a fixed RMS so WAV quantization behaves uniformly.
  double rms = 0.0;
  for (double s : clip.samples) rms += s * s;
  rms = std::sqrt(rms / static_cast<double>(clip.samples.size()));
  if (rms > 0.0) {
    const double gain = 0.08 / rms;
    for (double& s : clip.samples) s *= gain;
  }
  // Keep the occasional excursion inside PCM range.
  for (double& s : clip.samples) s = std::clamp(s, -0.999, 0.999);
  return clip;
}

AudioClip apply_duty_cycle(const AudioClip& clip, double on_s, double off_s) {
  if (!(on_s > 0.0) || off_s < 0.0) {
    throw std::invalid_argument("apply_duty_cycle: bad envelope durations");
  }
  const std::size_t on_n =
      static_cast<std::size_t>(std::llround(on_s * clip.sample_rate_hz));
  const std::size_t off_n =
      static_cast<std::size_t>(std::llround(off_s * clip.sample_rate_hz));
  const std::size_t period = on_n + off_n;
  AudioClip out = clip;
  if (period == 0 || off_n == 0) return out;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    if (i % period >= on_n) out.samples[i] = 0.0;
  }
  return out;
}

namespace {

const std::map<std::string, std::vector<double>>& channel_bank() {
  // Documented microphone analogs. M1 is clean; M2 adds a mild high-frequency
  // tilt; M3 is a strong low-pass tilt, the "worst" mismatch channel.
  static const std::map<std::string, std::vector<double>> bank = {
      {"M1", {1.0}},
      {"M2", {1.0, -0.35}},
      {"M3", {1.0, 0.9}},
  };
  return bank;
}

}  // namespace

std::vector<std::string> channel_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, taps] : channel_bank()) ids.push_back(id);
  return ids;
}

std::vector<double> channel_taps(const std::string& channel_id) {
  const auto it = channel_bank().find(channel_id);
  if (it == channel_bank().end()) {
    throw DataError("unknown channel '" + channel_id + "'");
  }
  return it->second;
}

AudioClip apply_channel(const AudioClip& clip, const std::string& channel_id) {
  const std::vector<double> taps = channel_taps(channel_id);
  if (taps.size() == 1 && taps[0] == 1.0) return clip;

  AudioClip out;
  out.sample_rate_hz = clip.sample_rate_hz;
  out.samples.resize(clip.samples.size(), 0.0);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < taps.size() && k <= i; ++k) {
      acc += taps[k] * clip.samples[i - k];
    }
    out.samples[i] = acc;
  }
  return out;
}

namespace {

// Bounded jitter of one pole set. Conjugate pairs move together so the
// coefficients stay real.
std::vector<std::complex<double>> jitter_poles(
    const std::vector<std::complex<double>>& poles, Prng& prng, double max_dr,
    double max_dtheta) {
  std::vector<std::complex<double>> out = poles;
  for (std::size_t i = 0; i < poles.size(); ++i) {
    const bool second_of_pair =
        i > 0 && poles[i].imag() != 0.0 &&
        std::abs(poles[i] - std::conj(poles[i - 1])) < 1e-12;
    if (second_of_pair) {
      out[i] = std::conj(out[i - 1]);
      continue;
    }
    const double radius = std::clamp(
        std::abs(poles[i]) + prng.uniform(-max_dr, max_dr), 0.05, 0.945);
    double angle = std::arg(poles[i]);
    if (poles[i].imag() != 0.0 && max_dtheta > 0.0) {
      angle = std::clamp(angle + prng.uniform(-max_dtheta, max_dtheta),
                         0.03 * M_PI, 0.97 * M_PI);
    }
    out[i] = std::polar(radius, angle);
  }
  return out;
}

// Phoneme-state analog: a larger excursion in both radius and angle, big
// enough that mean-removed features stay speaker-specific against the
// frame-level LPC estimation noise.
std::vector<std::complex<double>> perturb_poles(
    const std::vector<std::complex<double>>& poles, Prng& prng) {
  return jitter_poles(poles, prng, 0.10, 0.25);
}

// Session analog: every state filter gets its radii jittered by <= 0.02.
SynthSpeaker session_variant(const SynthSpeaker& spk, const std::string& session) {
  Prng prng(mix_seed({spk.seed, hash_str(session), 0x5E5510ULL}));
  SynthSpeaker out = spk;
  for (std::size_t s = 0; s < out.state_poles.size(); ++s) {
    out.state_poles[s] = jitter_poles(spk.state_poles[s], prng, 0.02, 0.0);
    out.state_ar[s] = poles_to_ar(out.state_poles[s]);
  }
  if (!out.state_poles.empty()) {
    out.poles = out.state_poles.front();
    out.ar_coeffs = out.state_ar.front();
  } else {
    out.poles = jitter_poles(spk.poles, prng, 0.02, 0.0);
    out.ar_coeffs = poles_to_ar(out.poles);
  }
  return out;
}

// Long-run mean cepstrum of a speaker: per-state cepstra averaged.
std::vector<double> mean_state_cepstrum(const SynthSpeaker& spk, int q) {
  std::vector<double> mean(static_cast<std::size_t>(q), 0.0);
  const std::size_t count = std::max<std::size_t>(1, spk.state_ar.size());
  for (std::size_t s = 0; s < count; ++s) {
    const std::vector<double>& a =
        spk.state_ar.empty() ? spk.ar_coeffs : spk.state_ar[s];
    const std::vector<double> c = frontend::lpc_to_lpcc(a, q);
    for (int n = 0; n < q; ++n) mean[static_cast<std::size_t>(n)] += c[static_cast<std::size_t>(n)];
  }
  for (double& v : mean) v /= static_cast<double>(count);
  return mean;
}

double min_pairwise_cepstral_distance(const std::vector<SynthSpeaker>& speakers) {
  constexpr int kQ = 20;
  std::vector<std::vector<double>> ceps;
  ceps.reserve(speakers.size());
  for (const SynthSpeaker& spk : speakers) {
    ceps.push_back(mean_state_cepstrum(spk, kQ));
  }
  double best = INFINITY;
  for (std::size_t i = 0; i < ceps.size(); ++i) {
    for (std::size_t j = i + 1; j < ceps.size(); ++j) {
      double d = 0.0;
      for (int n = 0; n < kQ; ++n) {
        const double diff = ceps[i][n] - ceps[j][n];
        d += diff * diff;
      }
      best = std::min(best, std::sqrt(d));
    }
  }
  return best;
}

}  // namespace

Manifest build_synth_corpus(const SynthCorpusParams& params) {
  if (params.n_speakers < 1) throw ConfigError("n_speakers must be >= 1");
  if (params.sessions.empty() || params.channels.empty() || params.languages.empty()) {
    throw ConfigError("sessions, channels and languages must be non-empty");
  }
  if (params.out_dir.empty()) throw ConfigError("out_dir must be set");
  if (params.states_per_speaker < 1) {
    throw ConfigError("states_per_speaker must be >= 1");
  }
  for (const std::string& ch : params.channels) channel_taps(ch);  // validate

  const fs::path out_dir(params.out_dir);
  const fs::path audio_dir = out_dir / "audio";
  fs::create_directories(audio_dir);

  // Draw speakers, regenerating any whose cepstrum collides with an earlier
  // one. The bound is loose; collisions are rare at AR(10).
  constexpr double kMinCepstralDistance = 0.3;
  std::vector<SynthSpeaker> speakers;
  for (int i = 0; i < params.n_speakers; ++i) {
    const std::string id = str_printf("spk%02d", i);
    std::uint64_t salt = 0;
    while (true) {
      SynthSpeaker candidate = make_synth_speaker(
          id, mix_seed({params.master_seed, static_cast<std::uint64_t>(i), salt}),
          params.speaker_ar_order, params.states_per_speaker);
      speakers.push_back(std::move(candidate));
      if (speakers.size() < 2 ||
          min_pairwise_cepstral_distance(speakers) > kMinCepstralDistance) {
        break;
      }
      speakers.pop_back();
      ++salt;
      if (salt > 64) {
        throw DataError("build_synth_corpus: could not draw distinct speakers");
      }
    }
  }

  std::vector<UtteranceRecord> records;
  for (int si = 0; si < params.n_speakers; ++si) {
    for (const std::string& session : params.sessions) {
      const SynthSpeaker spk = session_variant(speakers[si], session);
      for (const std::string& language : params.languages) {
        const int utt_count = 1 + params.tests_per_condition;
        for (int u = 0; u < utt_count; ++u) {
          const bool is_train = u == 0;
          const double duration =
              is_train ? params.train_duration_s : params.test_duration_s;
          const std::uint64_t utt_seed =
              mix_seed({params.master_seed, hash_str(spk.id), hash_str(session),
                        hash_str(language), static_cast<std::uint64_t>(u)});
          AudioClip base = synth_utterance(spk, duration, utt_seed);
          if (language == "s") {
            // Language analog: choppier duty cycle for the second language.
            base = apply_duty_cycle(base, 0.30, 0.10);
          }
          for (const std::string& channel : params.channels) {
            const AudioClip recorded = apply_channel(base, channel);
            UtteranceRecord rec;
            rec.key.speaker = spk.id;
            rec.key.session = session;
            rec.key.microphone = channel;
            rec.key.language = language;
            rec.key.role = is_train ? Role::kTrain : Role::kTest;
            rec.key.index = u;
            rec.duration_s = duration;
            rec.path = str_printf("audio/%s_%s_%s_%s_%s%d.wav", spk.id.c_str(),
                                  session.c_str(), channel.c_str(), language.c_str(),
                                  role_name(rec.key.role).c_str(), u);
            wav::write((out_dir / rec.path).string(), recorded);
            records.push_back(std::move(rec));
          }
        }
      }
    }
  }

  const std::string manifest_path = (out_dir / "manifest.tsv").string();
  save_manifest(manifest_path, records);
  return load_manifest(manifest_path);
}

}  // namespace corpus
}  // namespace sprec
