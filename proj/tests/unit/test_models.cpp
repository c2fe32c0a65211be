// tests/unit/test_models.cpp

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

#include <cmath>
#include <cstdio>
#include <set>

#include "doctest.h"
#include "sprec/util.hpp"

using namespace sprec;
using namespace sprec::models;

namespace {

FeatureSequence random_features(std::size_t t, std::size_t q, std::uint64_t seed) {
  Prng prng(seed);
  FeatureSequence seq;
  seq.vectors = Matrix(t, q);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t n = 0; n < q; ++n) seq.vectors(i, n) = prng.normal();
  }
  return seq;
}

Matrix random_spd(std::size_t q, std::uint64_t seed) {
  Prng prng(seed);
  Matrix b(q, q);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) b(i, j) = prng.normal();
  }
  Matrix out(q, q);
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < q; ++k) sum += b(i, k) * b(j, k);
      out(i, j) = sum;
    }
    out(i, i) += 0.5;
  }
  return out;
}

CovarianceModel cov_of(Matrix c) {
  CovarianceModel model;
  model.mean.assign(c.rows(), 0.0);
  model.c = std::move(c);
  return model;
}

}  // namespace

TEST_CASE("random codebooks sample distinct training rows") {
  const FeatureSequence feats = random_features(100, 4, 1);

  const VqCodebook single = train_vq_random(feats, 0, 9);
  CHECK(single.codewords.rows() == 1);

  const VqCodebook full = train_vq_random(feats, 6, 9);
  CHECK(full.codewords.rows() == 64);

  // Each codeword is one of the training rows, and no row is reused.
  std::set<std::size_t> matched;
  for (std::size_t k = 0; k < full.codewords.rows(); ++k) {
    bool found = false;
    for (std::size_t t = 0; t < feats.frames() && !found; ++t) {
      bool equal = true;
      for (std::size_t n = 0; n < feats.dim(); ++n) {
        if (feats.vectors(t, n) != full.codewords(k, n)) {
          equal = false;
          break;
        }
      }
      if (equal && !matched.count(t)) {
        matched.insert(t);
        found = true;
      }
    }
    CHECK(found);
  }

  const VqCodebook again = train_vq_random(feats, 6, 9);
  CHECK(again.codewords == full.codewords);
  const VqCodebook other_seed = train_vq_random(feats, 6, 10);
  CHECK(other_seed.codewords != full.codewords);

  CHECK_THROWS_WITH_AS(train_vq_random(random_features(63, 4, 2), 6, 1),
                       doctest::Contains("64"), DataError);
}

TEST_CASE("vq distortion basics and brute-force agreement") {
  FeatureSequence test = random_features(20, 3, 5);
  VqCodebook exact;
  exact.codewords = test.vectors;
  CHECK(vq_score(exact, test) == doctest::Approx(0.0));

  VqCodebook origin;
  origin.codewords = Matrix(1, 2, 0.0);
  FeatureSequence units;
  units.vectors = Matrix(0, 2);
  units.vectors.append_row(std::vector<double>{1.0, 0.0});
  units.vectors.append_row(std::vector<double>{0.0, 1.0});
  CHECK(vq_score(origin, units) == doctest::Approx(1.0));

  const FeatureSequence feats = random_features(40, 5, 6);
  VqCodebook cb;
  cb.codewords = random_features(8, 5, 7).vectors;
  double expected = 0.0;
  for (std::size_t t = 0; t < feats.frames(); ++t) {
    double best = INFINITY;
    for (std::size_t k = 0; k < cb.codewords.rows(); ++k) {
      double d = 0.0;
      for (std::size_t n = 0; n < 5; ++n) {
        const double diff = feats.vectors(t, n) - cb.codewords(k, n);
        d += diff * diff;
      }
      best = std::min(best, d);
    }
    expected += best;
  }
  expected /= static_cast<double>(feats.frames());
  CHECK(vq_score(cb, feats) == doctest::Approx(expected).epsilon(1e-12));

  VqCodebook wrong;
  wrong.codewords = Matrix(2, 4, 0.0);
  CHECK_THROWS_AS(vq_score(wrong, feats), std::invalid_argument);
}

TEST_CASE("vq distortion never increases when codewords are added") {
  const FeatureSequence feats = random_features(30, 4, 8);
  VqCodebook small;
  small.codewords = random_features(4, 4, 9).vectors;
  VqCodebook large = small;
  const Matrix extra = random_features(4, 4, 10).vectors;
  for (std::size_t k = 0; k < extra.rows(); ++k) {
    large.codewords.append_row(extra.row(k));
  }
  CHECK(vq_score(large, feats) <= vq_score(small, feats));
}

TEST_CASE("covariance training") {
  SUBCASE("rank-deficient data is rejected without a ridge") {
    FeatureSequence rank1;
    rank1.vectors = Matrix(0, 2);
    rank1.vectors.append_row(std::vector<double>{1.0, 0.0});
    rank1.vectors.append_row(std::vector<double>{-1.0, 0.0});
    CHECK_THROWS_WITH_AS(train_cov(rank1, 0.0), doctest::Contains("singular"),
                         DataError);
  }

  SUBCASE("zero-variance data with a ridge gives the ridge itself") {
    FeatureSequence constant;
    constant.vectors = Matrix(3, 2, 0.5);
    const CovarianceModel model = train_cov(constant, 0.25);
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        CHECK(model.c(i, j) == doctest::Approx(i == j ? 0.25 : 0.0));
      }
    }
  }

  SUBCASE("i.i.d. standard normal rows converge to the identity") {
    const FeatureSequence feats = random_features(10000, 5, 11);
    const CovarianceModel model = train_cov(feats, 0.0);
    double frob = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      for (std::size_t j = 0; j < 5; ++j) {
        const double target = i == j ? 1.0 : 0.0;
        frob += (model.c(i, j) - target) * (model.c(i, j) - target);
      }
    }
    CHECK(std::sqrt(frob) < 0.1);
    CHECK(max_asymmetry(model.c) < 1e-12);
  }

  SUBCASE("relative ridge keeps short sequences invertible") {
    const FeatureSequence feats = random_features(10, 20, 12);  // T < Q
    const CovarianceModel model = train_cov_relative(feats, 1e-6);
    CHECK(model.ridge > 0.0);
  }
}

TEST_CASE("sphericity identities") {
  const CovarianceModel c = cov_of(random_spd(6, 13));
  CHECK(sphericity(c, c) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));

  for (double k : {0.1, 10.0}) {
    CovarianceModel scaled = c;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) scaled.c(i, j) = k * c.c(i, j);
    }
    CHECK(std::abs(sphericity(c, scaled) + std::log(2.0)) < 1e-10);
  }

  const CovarianceModel a = cov_of(random_spd(6, 14));
  const CovarianceModel b = cov_of(random_spd(6, 15));
  CHECK(std::abs(sphericity(a, b) - sphericity(b, a)) < 1e-12);
}

TEST_CASE("sphericity hand-computed diagonal example") {
  Matrix cj(2, 2);
  cj(0, 0) = 1.0;
  cj(1, 1) = 2.0;
  Matrix ct(2, 2);
  ct(0, 0) = 2.0;
  ct(1, 1) = 1.0;
  // Traces are both 2.5; log(6.25/2) - 2 log 2 = -0.2469.
  CHECK(sphericity(cov_of(cj), cov_of(ct)) ==
        doctest::Approx(-0.246860077931526).epsilon(1e-12));
}

TEST_CASE("identification picks the closest model deterministically") {
  SUBCASE("single model wins by default") {
    SpeakerModel only;
    only.id = "solo";
    only.kind = ModelKind::kVq;
    only.vq = train_vq_random(random_features(80, 4, 16), 3, 1);
    CHECK(identify({only}, random_features(10, 4, 17)) == "solo");
  }

  SUBCASE("self-match dominates") {
    const FeatureSequence own = random_features(100, 4, 18);
    std::vector<SpeakerModel> models(3);
    const char* names[3] = {"spk_a", "spk_b", "spk_c"};
    for (int i = 0; i < 3; ++i) {
      models[static_cast<std::size_t>(i)].id = names[i];
      models[static_cast<std::size_t>(i)].kind = ModelKind::kVq;
      models[static_cast<std::size_t>(i)].vq = train_vq_random(
          i == 1 ? own : random_features(100, 4, 19 + static_cast<std::uint64_t>(i)),
          5, 2);
    }
    CHECK(identify(models, own) == "spk_b");
    CHECK(verify_score(models[1], own) <= verify_score(models[0], own));
    CHECK(verify_score(models[1], own) <= verify_score(models[2], own));
  }

  SUBCASE("ties break to the lexicographically smallest label") {
    const FeatureSequence feats = random_features(50, 4, 20);
    SpeakerModel m1, m2;
    m1.id = "zz";
    m2.id = "aa";
    m1.kind = m2.kind = ModelKind::kVq;
    m1.vq = train_vq_random(feats, 4, 3);
    m2.vq = m1.vq;  // identical codebooks, identical scores
    CHECK(identify({m1, m2}, feats) == "aa");
  }
}

TEST_CASE("verification score conventions") {
  const FeatureSequence feats = random_features(200, 5, 21);

  SpeakerModel vq_model;
  vq_model.id = "vq";
  vq_model.kind = ModelKind::kVq;
  vq_model.vq.codewords = feats.vectors;  // contains every test vector
  CHECK(verify_score(vq_model, feats) == doctest::Approx(0.0));

  SpeakerModel cm_model;
  cm_model.id = "cm";
  cm_model.kind = ModelKind::kCm;
  cm_model.cm = train_cov_relative(feats);
  CHECK(verify_score(cm_model, feats) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("rankings are invariant to the sphericity constant") {
  Prng prng(22);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<CovarianceModel> models;
    for (int i = 0; i < 6; ++i) {
      models.push_back(cov_of(random_spd(5, mix_seed(
          {static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(i)}))));
    }
    const CovarianceModel test = cov_of(random_spd(5, mix_seed(
        {static_cast<std::uint64_t>(trial), 999})));
    std::size_t best_full = 0, best_free = 0;
    for (std::size_t i = 1; i < models.size(); ++i) {
      if (sphericity(models[i], test) < sphericity(models[best_full], test)) {
        best_full = i;
      }
      if (sphericity_log_trace(models[i], test) <
          sphericity_log_trace(models[best_free], test)) {
        best_free = i;
      }
    }
    CHECK(best_full == best_free);
  }
}

TEST_CASE("model container round-trips exactly") {
  SpeakerModel vq_model;
  vq_model.id = "spk07";
  vq_model.kind = ModelKind::kVq;
  vq_model.chain_name = "CMS+ACW+SIGMA";
  vq_model.sigma.w = {1.5, 0.25, 3.0};
  vq_model.vq = train_vq_random(random_features(80, 3, 23), 4, 77);

  const std::string path = "test_model.spkm";
  save_model(path, vq_model);
  const SpeakerModel back = load_model(path);
  CHECK(back.id == vq_model.id);
  CHECK(back.kind == ModelKind::kVq);
  CHECK(back.chain_name == vq_model.chain_name);
  CHECK(back.sigma.w == vq_model.sigma.w);
  CHECK(back.vq.codewords == vq_model.vq.codewords);
  CHECK(back.vq.bits == vq_model.vq.bits);
  CHECK(back.vq.seed == vq_model.vq.seed);

  SpeakerModel cm_model;
  cm_model.id = "spk08";
  cm_model.kind = ModelKind::kCm;
  cm_model.chain_name = "LPCC";
  cm_model.cm = train_cov_relative(random_features(100, 4, 24));
  save_model(path, cm_model);
  const SpeakerModel cm_back = load_model(path);
  CHECK(cm_back.kind == ModelKind::kCm);
  CHECK(cm_back.cm.c == cm_model.cm.c);
  CHECK(cm_back.cm.mean == cm_model.cm.mean);
  CHECK(cm_back.cm.ridge == cm_model.cm.ridge);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_model("does_not_exist.spkm"), DataError);
}
