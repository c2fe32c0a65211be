// src/models.cpp

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

#include "sprec/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "sprec/util.hpp"

namespace sprec {

std::string model_kind_name(ModelKind k) {
  return k == ModelKind::kVq ? "vq" : "cm";
}

namespace models {

VqCodebook train_vq_random(const FeatureSequence& features, int bits,
                           std::uint64_t seed) {
  if (bits < 0 || bits > 20) {
    throw std::invalid_argument(str_printf("train_vq_random: bits %d out of range", bits));
  }
  const std::size_t k = std::size_t{1} << bits;
  const std::size_t t = features.frames();
  if (t < k) {
    throw DataError(str_printf(
        "train_vq_random: need %zu training frames for a %d-bit codebook, got %zu",
        k, bits, t));
  }
  // Partial Fisher-Yates over the frame indices.
  std::vector<std::size_t> indices(t);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  Prng prng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + prng.uniform_index(t - i);
    std::swap(indices[i], indices[j]);
  }
  VqCodebook cb;
  cb.bits = bits;
  cb.seed = seed;
  cb.codewords = Matrix(k, features.dim());
  for (std::size_t i = 0; i < k; ++i) {
    const std::span<const double> row = features.vectors.row(indices[i]);
    std::copy(row.begin(), row.end(), cb.codewords.row(i).begin());
  }
  return cb;
}

double vq_score(const VqCodebook& cb, const FeatureSequence& seq) {
  if (cb.codewords.cols() != seq.dim()) {
    throw std::invalid_argument(str_printf(
        "vq_score: codebook dimension %zu != feature dimension %zu",
        cb.codewords.cols(), seq.dim()));
  }
  if (seq.frames() == 0) {
    throw std::invalid_argument("vq_score: empty feature sequence");
  }
  const std::size_t q = seq.dim();
  const std::size_t k = cb.codewords.rows();
  double total = 0.0;
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    const double* x = seq.vectors.row(t).data();
    double best = INFINITY;
    for (std::size_t i = 0; i < k; ++i) {
      const double* c = cb.codewords.row(i).data();
      double d = 0.0;
      for (std::size_t n = 0; n < q; ++n) {
        const double diff = x[n] - c[n];
        d += diff * diff;
      }
      best = std::min(best, d);
    }
    total += best;
  }
  return total / static_cast<double>(seq.frames());
}

namespace {

// Raw mean-removed covariance, no ridge.
void covariance_raw(const FeatureSequence& features, Matrix* c,
                    std::vector<double>* mean) {
  const std::size_t t = features.frames();
  const std::size_t q = features.dim();
  if (t < 2) {
    throw DataError(str_printf("covariance: need >= 2 frames, got %zu", t));
  }
  mean->assign(q, 0.0);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t n = 0; n < q; ++n) (*mean)[n] += features.vectors(i, n);
  }
  for (double& m : *mean) m /= static_cast<double>(t);

  *c = Matrix(q, q);
  std::vector<double> centered(q);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t n = 0; n < q; ++n) {
      centered[n] = features.vectors(i, n) - (*mean)[n];
    }
    for (std::size_t r = 0; r < q; ++r) {
      for (std::size_t s = r; s < q; ++s) {
        (*c)(r, s) += centered[r] * centered[s];
      }
    }
  }
  for (std::size_t r = 0; r < q; ++r) {
    for (std::size_t s = r; s < q; ++s) {
      (*c)(r, s) /= static_cast<double>(t);
      (*c)(s, r) = (*c)(r, s);
    }
  }
}

void check_pd(const Matrix& c, double ridge) {
  try {
    cholesky(c);
  } catch (const DataError&) {
    throw DataError(str_printf(
        "covariance matrix singular with ridge %.3e; use more data or a larger ridge",
        ridge));
  }
}

}  // namespace

CovarianceModel train_cov(const FeatureSequence& features, double ridge) {
  if (ridge < 0.0) throw std::invalid_argument("train_cov: ridge must be >= 0");
  CovarianceModel model;
  covariance_raw(features, &model.c, &model.mean);
  for (std::size_t i = 0; i < model.c.rows(); ++i) model.c(i, i) += ridge;
  model.ridge = ridge;
  check_pd(model.c, ridge);
  return model;
}

CovarianceModel train_cov_relative(const FeatureSequence& features,
                                   double ridge_scale) {
  if (ridge_scale < 0.0) {
    throw std::invalid_argument("train_cov_relative: ridge_scale must be >= 0");
  }
  CovarianceModel model;
  covariance_raw(features, &model.c, &model.mean);
  double trace = 0.0;
  for (std::size_t i = 0; i < model.c.rows(); ++i) trace += model.c(i, i);
  model.ridge = ridge_scale * trace / static_cast<double>(model.c.rows());
  for (std::size_t i = 0; i < model.c.rows(); ++i) model.c(i, i) += model.ridge;
  check_pd(model.c, model.ridge);
  return model;
}

double sphericity(const CovarianceModel& model, const CovarianceModel& test) {
  const double p = static_cast<double>(model.c.rows());
  return sphericity_log_trace(model, test) - std::log(2.0) - 2.0 * std::log(p);
}

double sphericity_log_trace(const CovarianceModel& model,
                            const CovarianceModel& test) {
  if (model.c.rows() != test.c.rows()) {
    throw std::invalid_argument(str_printf(
        "sphericity: dimension mismatch %zu vs %zu", model.c.rows(), test.c.rows()));
  }
  const Matrix model_inv = invert_spd(model.c);
  const Matrix test_inv = invert_spd(test.c);
  const double t1 = trace_product(test.c, model_inv);
  const double t2 = trace_product(model.c, test_inv);
  return std::log(t1 * t2);
}

std::vector<double> score_all(const std::vector<SpeakerModel>& models,
                              const FeatureSequence& seq) {
  if (models.empty()) throw std::invalid_argument("score_all: no models");
  std::vector<double> scores;
  scores.reserve(models.size());
  if (models.front().kind == ModelKind::kCm) {
    const CovarianceModel test = train_cov_relative(seq);
    for (const SpeakerModel& m : models) {
      if (m.kind != ModelKind::kCm) {
        throw std::invalid_argument("score_all: mixed model kinds");
      }
      scores.push_back(sphericity(m.cm, test));
    }
  } else {
    for (const SpeakerModel& m : models) {
      if (m.kind != ModelKind::kVq) {
        throw std::invalid_argument("score_all: mixed model kinds");
      }
      scores.push_back(vq_score(m.vq, seq));
    }
  }
  return scores;
}

std::string identify(const std::vector<SpeakerModel>& models,
                     const FeatureSequence& seq) {
  const std::vector<double> scores = score_all(models, seq);
  std::size_t best = 0;
  for (std::size_t i = 1; i < models.size(); ++i) {
    if (scores[i] < scores[best] ||
        (scores[i] == scores[best] && models[i].id < models[best].id)) {
      best = i;
    }
  }
  return models[best].id;
}

double verify_score(const SpeakerModel& model, const FeatureSequence& seq) {
  if (model.kind == ModelKind::kVq) return vq_score(model.vq, seq);
  return sphericity(model.cm, train_cov_relative(seq));
}

namespace {

constexpr char kModelMagic[8] = {'S', 'P', 'K', 'M', 'D', 'L', '0', '1'};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};

void put(std::FILE* f, const void* p, std::size_t n, const std::string& path) {
  if (std::fwrite(p, 1, n, f) != n) throw DataError("short write to " + path);
}

void get(std::FILE* f, void* p, std::size_t n, const std::string& path) {
  if (std::fread(p, 1, n, f) != n) throw DataError("truncated model file " + path);
}

void put_u32(std::FILE* f, std::uint32_t v, const std::string& path) {
  put(f, &v, sizeof v, path);
}

std::uint32_t get_u32(std::FILE* f, const std::string& path) {
  std::uint32_t v = 0;
  get(f, &v, sizeof v, path);
  return v;
}

void put_u64(std::FILE* f, std::uint64_t v, const std::string& path) {
  put(f, &v, sizeof v, path);
}

std::uint64_t get_u64(std::FILE* f, const std::string& path) {
  std::uint64_t v = 0;
  get(f, &v, sizeof v, path);
  return v;
}

void put_f64(std::FILE* f, double v, const std::string& path) {
  put(f, &v, sizeof v, path);
}

double get_f64(std::FILE* f, const std::string& path) {
  double v = 0;
  get(f, &v, sizeof v, path);
  return v;
}

void put_str(std::FILE* f, const std::string& s, const std::string& path) {
  put_u32(f, static_cast<std::uint32_t>(s.size()), path);
  put(f, s.data(), s.size(), path);
}

std::string get_str(std::FILE* f, const std::string& path) {
  std::string s(get_u32(f, path), '\0');
  get(f, s.data(), s.size(), path);
  return s;
}

void put_mat(std::FILE* f, const Matrix& m, const std::string& path) {
  put_u32(f, static_cast<std::uint32_t>(m.rows()), path);
  put_u32(f, static_cast<std::uint32_t>(m.cols()), path);
  put(f, m.data(), m.size() * sizeof(double), path);
}

Matrix get_mat(std::FILE* f, const std::string& path) {
  const std::uint32_t rows = get_u32(f, path);
  const std::uint32_t cols = get_u32(f, path);
  Matrix m(rows, cols);
  get(f, m.data(), m.size() * sizeof(double), path);
  return m;
}

void put_vec(std::FILE* f, const std::vector<double>& v, const std::string& path) {
  put_u32(f, static_cast<std::uint32_t>(v.size()), path);
  put(f, v.data(), v.size() * sizeof(double), path);
}

std::vector<double> get_vec(std::FILE* f, const std::string& path) {
  std::vector<double> v(get_u32(f, path));
  get(f, v.data(), v.size() * sizeof(double), path);
  return v;
}

}  // namespace

void save_model(const std::string& path, const SpeakerModel& model) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
  if (!f) throw DataError("cannot open " + path + " for writing");
  put(f.get(), kModelMagic, sizeof kModelMagic, path);
  put_str(f.get(), model.id, path);
  put_u32(f.get(), model.kind == ModelKind::kVq ? 0u : 1u, path);
  put_str(f.get(), model.chain_name, path);
  put_vec(f.get(), model.sigma.w, path);
  if (model.kind == ModelKind::kVq) {
    put_u32(f.get(), static_cast<std::uint32_t>(model.vq.bits), path);
    put_u64(f.get(), model.vq.seed, path);
    put_mat(f.get(), model.vq.codewords, path);
  } else {
    put_f64(f.get(), model.cm.ridge, path);
    put_vec(f.get(), model.cm.mean, path);
    put_mat(f.get(), model.cm.c, path);
  }
}

SpeakerModel load_model(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DataError("cannot open model file " + path);
  char magic[8];
  get(f.get(), magic, sizeof magic, path);
  if (std::memcmp(magic, kModelMagic, sizeof magic) != 0) {
    throw DataError(path + " is not a speaker model file");
  }
  SpeakerModel model;
  model.id = get_str(f.get(), path);
  model.kind = get_u32(f.get(), path) == 0 ? ModelKind::kVq : ModelKind::kCm;
  model.chain_name = get_str(f.get(), path);
  model.sigma.w = get_vec(f.get(), path);
  if (model.kind == ModelKind::kVq) {
    model.vq.bits = static_cast<int>(get_u32(f.get(), path));
    model.vq.seed = get_u64(f.get(), path);
    model.vq.codewords = get_mat(f.get(), path);
  } else {
    model.cm.ridge = get_f64(f.get(), path);
    model.cm.mean = get_vec(f.get(), path);
    model.cm.c = get_mat(f.get(), path);
  }
  return model;
}

}  // namespace models
}  // namespace sprec
