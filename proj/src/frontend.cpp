// src/frontend.cpp

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

#include "sprec/frontend.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

#include "sprec/util.hpp"

namespace sprec {

FrontendConfig FrontendConfig::vq_preset() {
  FrontendConfig cfg;
  cfg.lpc_order = 16;
  cfg.cepstrum_order = 16;
  return cfg;
}

FrontendConfig FrontendConfig::cm_preset() {
  FrontendConfig cfg;
  cfg.lpc_order = 20;
  cfg.cepstrum_order = 20;
  return cfg;
}

void FrontendConfig::validate() const {
  if (!(preemphasis >= 0.0 && preemphasis < 1.0)) {
    throw ConfigError(str_printf("preemphasis %.3f outside [0,1)", preemphasis));
  }
  if (frame_len < 2) throw ConfigError("frame_len must be >= 2");
  if (frame_shift < 1 || frame_shift > frame_len) {
    throw ConfigError(str_printf("frame_shift %d outside [1, frame_len=%d]",
                                 frame_shift, frame_len));
  }
  if (lpc_order < 1) throw ConfigError("lpc_order must be >= 1");
  if (cepstrum_order < lpc_order) {
    throw ConfigError(str_printf("cepstrum_order %d < lpc_order %d",
                                 cepstrum_order, lpc_order));
  }
  if (!(energy_floor_db > 0.0)) {
    throw ConfigError("energy_floor_db must be > 0");
  }
  if (frame_len <= lpc_order) {
    throw ConfigError(str_printf("frame_len %d too short for lpc_order %d",
                                 frame_len, lpc_order));
  }
}

namespace frontend {

AudioClip preemphasize(const AudioClip& x, double coeff) {
  if (!(coeff >= 0.0 && coeff < 1.0)) {
    throw std::invalid_argument(
        str_printf("preemphasize: coeff %.6f outside [0,1)", coeff));
  }
  for (std::size_t n = 0; n < x.samples.size(); ++n) {
    if (!std::isfinite(x.samples[n])) {
      throw DataError(str_printf("preemphasize: non-finite sample at index %zu", n));
    }
  }
  AudioClip y;
  y.sample_rate_hz = x.sample_rate_hz;
  y.samples.resize(x.samples.size());
  if (!x.samples.empty()) {
    y.samples[0] = x.samples[0];
    for (std::size_t n = 1; n < x.samples.size(); ++n) {
      y.samples[n] = x.samples[n] - coeff * x.samples[n - 1];
    }
  }
  return y;
}

Matrix frame_and_window(const AudioClip& x, const FrontendConfig& cfg) {
  const int len = static_cast<int>(x.samples.size());
  const int n = cfg.frame_len;
  if (len < n) {
    log_warn(str_printf("signal of %d samples shorter than one %d-sample frame",
                        len, n));
    return Matrix(0, static_cast<std::size_t>(n));
  }
  const int count = (len - n) / cfg.frame_shift + 1;

  std::vector<double> window(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    window[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (n - 1));
  }

  Matrix frames(static_cast<std::size_t>(count), static_cast<std::size_t>(n));
  for (int f = 0; f < count; ++f) {
    const double* src = x.samples.data() + static_cast<std::size_t>(f) * cfg.frame_shift;
    double* dst = frames.row(static_cast<std::size_t>(f)).data();
    for (int i = 0; i < n; ++i) dst[i] = src[i] * window[i];
  }
  return frames;
}

Matrix energy_gate(const Matrix& frames, double floor_db) {
  if (!(floor_db > 0.0)) {
    throw std::invalid_argument("energy_gate: floor_db must be > 0");
  }
  const std::size_t t = frames.rows();
  std::vector<double> energy_db(t, -INFINITY);
  double max_db = -INFINITY;
  for (std::size_t f = 0; f < t; ++f) {
    double e = 0.0;
    for (double s : frames.row(f)) e += s * s;
    if (e > 0.0) energy_db[f] = 10.0 * std::log10(e);
    max_db = std::max(max_db, energy_db[f]);
  }
  if (!std::isfinite(max_db)) {
    if (t > 0) log_warn("energy_gate: all frames silent, nothing retained");
    return Matrix(0, frames.cols());
  }
  Matrix kept(0, frames.cols());
  for (std::size_t f = 0; f < t; ++f) {
    if (energy_db[f] > max_db - floor_db) kept.append_row(frames.row(f));
  }
  if (kept.rows() == 0) log_warn("energy_gate: no frame above the floor");
  return kept;
}

std::vector<double> autocorrelation(std::span<const double> frame, int order) {
  const int n = static_cast<int>(frame.size());
  if (n <= order) {
    throw std::invalid_argument(str_printf(
        "autocorrelation: frame of %d samples too short for order %d", n, order));
  }
  std::vector<double> r(static_cast<std::size_t>(order) + 1, 0.0);
  for (int k = 0; k <= order; ++k) {
    double sum = 0.0;
    for (int i = 0; i + k < n; ++i) sum += frame[i] * frame[i + k];
    r[k] = sum;
  }
  return r;
}

std::optional<LpcFrame> levinson(std::span<const double> r) {
  if (r.size() < 2) {
    throw std::invalid_argument("levinson: need r[0..P] with P >= 1");
  }
  const int p = static_cast<int>(r.size()) - 1;
  if (!(r[0] > 0.0)) return std::nullopt;

  std::vector<double> a(static_cast<std::size_t>(p), 0.0);
  std::vector<double> prev(a.size(), 0.0);
  double err = r[0];
  for (int i = 1; i <= p; ++i) {
    double acc = r[i];
    for (int j = 1; j < i; ++j) acc += prev[j - 1] * r[i - j];
    const double k = -acc / err;
    a[i - 1] = k;
    for (int j = 1; j < i; ++j) a[j - 1] = prev[j - 1] + k * prev[i - j - 1];
    err *= 1.0 - k * k;
    if (!(err > 0.0)) return std::nullopt;
    prev = a;
  }
  return LpcFrame{std::move(a), err};
}

std::vector<double> lpc_to_lpcc(std::span<const double> a, int q) {
  if (q < 1) throw std::invalid_argument("lpc_to_lpcc: q must be >= 1");
  const int p = static_cast<int>(a.size());
  std::vector<double> c(static_cast<std::size_t>(q), 0.0);
  for (int n = 1; n <= q; ++n) {
    double acc = 0.0;
    for (int k = std::max(1, n - p); k < n; ++k) {
      acc += k * c[k - 1] * a[n - k - 1];
    }
    c[n - 1] = -acc / n;
    if (n <= p) c[n - 1] -= a[n - 1];
  }
  return c;
}

ExtractResult extract(const AudioClip& x, const FrontendConfig& cfg) {
  cfg.validate();
  ExtractResult out;

  const AudioClip emphasized = preemphasize(x, cfg.preemphasis);
  const Matrix framed = frame_and_window(emphasized, cfg);
  out.frames_total = static_cast<int>(framed.rows());
  const Matrix gated = energy_gate(framed, cfg.energy_floor_db);
  out.frames_gated = out.frames_total - static_cast<int>(gated.rows());

  const std::size_t q = static_cast<std::size_t>(cfg.cepstrum_order);
  const std::size_t p = static_cast<std::size_t>(cfg.lpc_order);
  out.features.vectors = Matrix(0, q);
  out.lpc = Matrix(0, p);

  for (std::size_t f = 0; f < gated.rows(); ++f) {
    const std::vector<double> r = autocorrelation(gated.row(f), cfg.lpc_order);
    const std::optional<LpcFrame> lpc = levinson(r);
    if (!lpc) {
      ++out.frames_degenerate;
      continue;
    }
    const std::vector<double> c = lpc_to_lpcc(lpc->coeffs, cfg.cepstrum_order);
    out.features.vectors.append_row(c);
    out.lpc.append_row(lpc->coeffs);
  }
  if (out.frames_degenerate > 0) {
    log_info(str_printf("extract: dropped %d degenerate frame(s)",
                        out.frames_degenerate));
  }
  if (out.features.frames() == 0) {
    log_warn("extract: no frame survived gating and analysis");
  }
  return out;
}

namespace {

constexpr char kFeatureMagic[8] = {'S', 'P', 'K', 'F', 'T', 'R', '0', '1'};

void write_bytes(std::FILE* f, const void* p, std::size_t n, const std::string& path) {
  if (std::fwrite(p, 1, n, f) != n) {
    throw DataError("short write to " + path);
  }
}

void read_bytes(std::FILE* f, void* p, std::size_t n, const std::string& path) {
  if (std::fread(p, 1, n, f) != n) {
    throw DataError("truncated feature file " + path);
  }
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};

void write_u32(std::FILE* f, std::uint32_t v, const std::string& path) {
  write_bytes(f, &v, sizeof v, path);
}

std::uint32_t read_u32(std::FILE* f, const std::string& path) {
  std::uint32_t v = 0;
  read_bytes(f, &v, sizeof v, path);
  return v;
}

void write_string(std::FILE* f, const std::string& s, const std::string& path) {
  write_u32(f, static_cast<std::uint32_t>(s.size()), path);
  write_bytes(f, s.data(), s.size(), path);
}

std::string read_string(std::FILE* f, const std::string& path) {
  const std::uint32_t n = read_u32(f, path);
  std::string s(n, '\0');
  read_bytes(f, s.data(), n, path);
  return s;
}

void write_matrix(std::FILE* f, const Matrix& m, const std::string& path) {
  write_u32(f, static_cast<std::uint32_t>(m.rows()), path);
  write_u32(f, static_cast<std::uint32_t>(m.cols()), path);
  write_bytes(f, m.data(), m.size() * sizeof(double), path);
}

Matrix read_matrix(std::FILE* f, const std::string& path) {
  const std::uint32_t rows = read_u32(f, path);
  const std::uint32_t cols = read_u32(f, path);
  Matrix m(rows, cols);
  read_bytes(f, m.data(), m.size() * sizeof(double), path);
  return m;
}

}  // namespace

void save_features(const std::string& path, const ExtractResult& fr) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
  if (!f) throw DataError("cannot open " + path + " for writing");
  write_bytes(f.get(), kFeatureMagic, sizeof kFeatureMagic, path);
  const ConditionKey& k = fr.features.meta;
  write_string(f.get(), k.speaker, path);
  write_string(f.get(), k.session, path);
  write_string(f.get(), k.microphone, path);
  write_string(f.get(), k.language, path);
  write_u32(f.get(), k.role == Role::kTrain ? 0u : 1u, path);
  write_u32(f.get(), static_cast<std::uint32_t>(k.index), path);
  write_u32(f.get(), static_cast<std::uint32_t>(fr.frames_total), path);
  write_u32(f.get(), static_cast<std::uint32_t>(fr.frames_gated), path);
  write_u32(f.get(), static_cast<std::uint32_t>(fr.frames_degenerate), path);
  write_matrix(f.get(), fr.features.vectors, path);
  write_matrix(f.get(), fr.lpc, path);
}

ExtractResult load_features(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DataError("cannot open feature file " + path);
  char magic[8];
  read_bytes(f.get(), magic, sizeof magic, path);
  if (std::memcmp(magic, kFeatureMagic, sizeof magic) != 0) {
    throw DataError(path + " is not a feature file");
  }
  ExtractResult fr;
  ConditionKey& k = fr.features.meta;
  k.speaker = read_string(f.get(), path);
  k.session = read_string(f.get(), path);
  k.microphone = read_string(f.get(), path);
  k.language = read_string(f.get(), path);
  k.role = read_u32(f.get(), path) == 0 ? Role::kTrain : Role::kTest;
  k.index = static_cast<int>(read_u32(f.get(), path));
  fr.frames_total = static_cast<int>(read_u32(f.get(), path));
  fr.frames_gated = static_cast<int>(read_u32(f.get(), path));
  fr.frames_degenerate = static_cast<int>(read_u32(f.get(), path));
  fr.features.vectors = read_matrix(f.get(), path);
  fr.lpc = read_matrix(f.get(), path);
  return fr;
}

}  // namespace frontend
}  // namespace sprec
