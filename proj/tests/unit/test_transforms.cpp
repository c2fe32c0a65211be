// tests/unit/test_transforms.cpp

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

#include "sprec/transforms.hpp"

#include <cmath>
#include <complex>

#include "doctest.h"
#include "sprec/corpus.hpp"
#include "sprec/util.hpp"
#include "support/test_support.hpp"

using namespace sprec;
using namespace sprec::transforms;

namespace {

FeatureSequence seq_of(std::vector<std::vector<double>> rows) {
  FeatureSequence seq;
  if (rows.empty()) return seq;
  seq.vectors = Matrix(0, rows.front().size());
  for (const std::vector<double>& row : rows) seq.vectors.append_row(row);
  return seq;
}

FeatureSequence random_seq(std::size_t t, std::size_t q, std::uint64_t seed) {
  Prng prng(seed);
  FeatureSequence seq;
  seq.vectors = Matrix(t, q);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t n = 0; n < q; ++n) seq.vectors(i, n) = prng.normal();
  }
  return seq;
}

}  // namespace

TEST_CASE("drop_low2 slices off the first two coefficients") {
  const FeatureSequence out = drop_low2(seq_of({{1, 2, 3, 4}}));
  CHECK(out.dim() == 2);
  CHECK(out.vectors(0, 0) == 3);
  CHECK(out.vectors(0, 1) == 4);

  const FeatureSequence minimal = drop_low2(seq_of({{5, 6, 7}}));
  CHECK(minimal.dim() == 1);
  CHECK(minimal.vectors(0, 0) == 7);

  FeatureSequence empty;
  empty.vectors = Matrix(0, 5);
  CHECK(drop_low2(empty).dim() == 3);
  CHECK(drop_low2(empty).frames() == 0);

  CHECK_THROWS_AS(drop_low2(seq_of({{1, 2}})), std::invalid_argument);
}

TEST_CASE("cms removes the per-utterance mean") {
  const FeatureSequence constant = cms(seq_of({{2, -1}, {2, -1}, {2, -1}}));
  for (std::size_t t = 0; t < constant.frames(); ++t) {
    CHECK(constant.vectors(t, 0) == doctest::Approx(0.0));
    CHECK(constant.vectors(t, 1) == doctest::Approx(0.0));
  }

  const FeatureSequence two = cms(seq_of({{1, 0}, {3, 0}}));
  CHECK(two.vectors(0, 0) == doctest::Approx(-1.0));
  CHECK(two.vectors(1, 0) == doctest::Approx(1.0));

  const FeatureSequence random = random_seq(50, 8, 3);
  const FeatureSequence centered = cms(random);
  for (std::size_t n = 0; n < centered.dim(); ++n) {
    double mean = 0.0;
    for (std::size_t t = 0; t < centered.frames(); ++t) mean += centered.vectors(t, n);
    CHECK(std::abs(mean / static_cast<double>(centered.frames())) < 1e-12);
  }

  // Per-row constant bias cancels.
  FeatureSequence biased = random;
  Prng prng(4);
  std::vector<double> bias(biased.dim());
  for (double& b : bias) b = prng.uniform(-2.0, 2.0);
  for (std::size_t t = 0; t < biased.frames(); ++t) {
    for (std::size_t n = 0; n < biased.dim(); ++n) biased.vectors(t, n) += bias[n];
  }
  const FeatureSequence centered_biased = cms(biased);
  for (std::size_t t = 0; t < centered.frames(); ++t) {
    for (std::size_t n = 0; n < centered.dim(); ++n) {
      CHECK(centered_biased.vectors(t, n) ==
            doctest::Approx(centered.vectors(t, n)).epsilon(1e-12));
    }
  }

  FeatureSequence empty;
  empty.vectors = Matrix(0, 4);
  CHECK(cms(empty).frames() == 0);
}

TEST_CASE("acw reduces to the plain cepstrum for a single pole") {
  Matrix lpc(0, 1);
  lpc.append_row(std::vector<double>{-0.5});
  const FeatureSequence out = acw(lpc, 8);
  const std::vector<double> plain = frontend::lpc_to_lpcc(std::vector<double>{-0.5}, 8);
  for (int n = 0; n < 8; ++n) {
    CHECK(out.vectors(0, static_cast<std::size_t>(n)) ==
          doctest::Approx(plain[static_cast<std::size_t>(n)]).epsilon(1e-12));
  }
}

TEST_CASE("acw matches the pole-sum spectrum oracle") {
  SUBCASE("two real poles") {
    const std::vector<std::complex<double>> poles = {0.5, -0.3};
    Matrix lpc(0, 2);
    lpc.append_row(corpus::poles_to_ar(poles));
    const FeatureSequence out = acw(lpc, 16);
    const std::vector<double> expected = sprec::testing::acw_fft_oracle(poles, 16);
    for (int n = 0; n < 16; ++n) {
      CHECK(std::abs(out.vectors(0, static_cast<std::size_t>(n)) -
                     expected[static_cast<std::size_t>(n)]) < 1e-6);
    }
  }

  SUBCASE("conjugate pairs, many orders") {
    Prng prng(9);
    for (int order : {4, 10, 16}) {
      const std::vector<std::complex<double>> poles =
          corpus::random_stable_poles(prng, order, 0.3, 0.9);
      Matrix lpc(0, static_cast<std::size_t>(order));
      lpc.append_row(corpus::poles_to_ar(poles));
      const FeatureSequence out = acw(lpc, 20);
      const std::vector<double> expected = sprec::testing::acw_fft_oracle(poles, 20);
      for (int n = 0; n < 20; ++n) {
        const double got = out.vectors(0, static_cast<std::size_t>(n));
        CHECK(std::isfinite(got));
        CHECK(std::abs(got - expected[static_cast<std::size_t>(n)]) < 1e-6);
      }
    }
  }
}

TEST_CASE("linear weighting ramps by coefficient index") {
  const FeatureSequence out = linear_weight(seq_of({{1, 1, 1}}));
  CHECK(out.vectors(0, 0) == 1);
  CHECK(out.vectors(0, 1) == 2);
  CHECK(out.vectors(0, 2) == 3);

  const FeatureSequence zero = linear_weight(seq_of({{0, 0, 0}}));
  for (std::size_t n = 0; n < 3; ++n) CHECK(zero.vectors(0, n) == 0);

  const FeatureSequence twice = linear_weight(linear_weight(seq_of({{1, 1, 1}})));
  CHECK(twice.vectors(0, 0) == 1);
  CHECK(twice.vectors(0, 1) == 4);
  CHECK(twice.vectors(0, 2) == 9);
}

TEST_CASE("bandpass lifter endpoints and degenerate height") {
  const int q = 8;
  FeatureSequence ones = seq_of({std::vector<double>(q, 1.0)});

  const FeatureSequence deflt = bandpass_lifter(ones, 0, -1.0);
  CHECK(deflt.vectors(0, q - 1) == doctest::Approx(1.0));  // sin(pi) = 0
  CHECK(deflt.vectors(0, q / 2 - 1) == doctest::Approx(1.0 + q / 2.0));  // sine peak

  const FeatureSequence identity = bandpass_lifter(ones, 0, 0.0);
  for (int n = 0; n < q; ++n) {
    CHECK(identity.vectors(0, static_cast<std::size_t>(n)) == doctest::Approx(1.0));
  }

  CHECK_THROWS_AS(bandpass_lifter(ones, 5, 1.0), std::invalid_argument);
}

TEST_CASE("sigma fitting pools population statistics") {
  const SigmaWeights w = sigma_fit(std::vector<FeatureSequence>{
      seq_of({{0.0}}), seq_of({{2.0}})});
  CHECK(w.w.size() == 1);
  CHECK(w.w[0] == doctest::Approx(1.0));

  const SigmaWeights constant = sigma_fit(std::vector<FeatureSequence>{
      seq_of({{3.0}, {3.0}, {3.0}})});
  CHECK(constant.w[0] == doctest::Approx(1e8));

  // Two-pass oracle on a random corpus.
  std::vector<FeatureSequence> corpus;
  for (int i = 0; i < 4; ++i) corpus.push_back(random_seq(30, 6, 40 + i));
  const SigmaWeights fitted = sigma_fit(corpus);
  for (std::size_t n = 0; n < 6; ++n) {
    double mean = 0.0;
    std::size_t count = 0;
    for (const FeatureSequence& seq : corpus) {
      for (std::size_t t = 0; t < seq.frames(); ++t) {
        mean += seq.vectors(t, n);
        ++count;
      }
    }
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (const FeatureSequence& seq : corpus) {
      for (std::size_t t = 0; t < seq.frames(); ++t) {
        var += (seq.vectors(t, n) - mean) * (seq.vectors(t, n) - mean);
      }
    }
    var /= static_cast<double>(count);
    CHECK(std::abs(1.0 / fitted.w[n] - std::sqrt(var)) < 1e-10);
  }

  CHECK_THROWS_AS(sigma_fit(std::vector<FeatureSequence>{}), std::invalid_argument);
  CHECK_THROWS_AS(sigma_fit(std::vector<FeatureSequence>{seq_of({{1.0}})}),
                  std::invalid_argument);
}

TEST_CASE("sigma application normalizes the fitting corpus to unit spread") {
  const FeatureSequence identity =
      sigma_apply(seq_of({{2, 4}}), SigmaWeights{{1.0, 1.0}});
  CHECK(identity.vectors(0, 0) == 2);
  CHECK(identity.vectors(0, 1) == 4);

  const FeatureSequence weighted =
      sigma_apply(seq_of({{2, 4}}), SigmaWeights{{0.5, 0.25}});
  CHECK(weighted.vectors(0, 0) == doctest::Approx(1.0));
  CHECK(weighted.vectors(0, 1) == doctest::Approx(1.0));

  std::vector<FeatureSequence> corpus;
  for (int i = 0; i < 3; ++i) corpus.push_back(random_seq(40, 5, 60 + i));
  const SigmaWeights fitted = sigma_fit(corpus);
  std::vector<FeatureSequence> normalized;
  for (const FeatureSequence& seq : corpus) normalized.push_back(sigma_apply(seq, fitted));
  const SigmaWeights refit = sigma_fit(normalized);
  for (double w : refit.w) CHECK(w == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("postfilter weighting") {
  const FeatureSequence out =
      postfilter_weight(seq_of({{1.0}}), PostfilterParams{1.0, 0.9});
  CHECK(out.vectors(0, 0) == doctest::Approx(0.1));

  FeatureSequence ones = seq_of({std::vector<double>(20, 1.0)});
  const FeatureSequence long_out = postfilter_weight(ones, PostfilterParams{1.0, 0.9});
  CHECK(long_out.vectors(0, 19) ==
        doctest::Approx(1.0 - std::pow(0.9, 20)).epsilon(1e-12));

  CHECK_THROWS_AS(postfilter_weight(ones, PostfilterParams{0.9, 0.9}), ConfigError);
}

TEST_CASE("weighting transforms are linear and diagonal") {
  const FeatureSequence x = random_seq(10, 8, 70);
  const FeatureSequence y = random_seq(10, 8, 71);
  const double a = 1.25, b = -0.75;
  FeatureSequence combo = x;
  for (std::size_t t = 0; t < x.frames(); ++t) {
    for (std::size_t n = 0; n < x.dim(); ++n) {
      combo.vectors(t, n) = a * x.vectors(t, n) + b * y.vectors(t, n);
    }
  }
  const SigmaWeights w{{0.5, 1.0, 2.0, 0.25, 4.0, 1.5, 3.0, 0.8}};
  const auto apply = [&](const FeatureSequence& s, int which) {
    switch (which) {
      case 0: return linear_weight(s);
      case 1: return bandpass_lifter(s, 0, -1.0);
      case 2: return sigma_apply(s, w);
      default: return postfilter_weight(s, PostfilterParams{1.0, 0.9});
    }
  };
  for (int which = 0; which < 4; ++which) {
    const FeatureSequence tx = apply(x, which);
    const FeatureSequence ty = apply(y, which);
    const FeatureSequence tc = apply(combo, which);
    for (std::size_t t = 0; t < x.frames(); ++t) {
      for (std::size_t n = 0; n < x.dim(); ++n) {
        CHECK(tc.vectors(t, n) ==
              doctest::Approx(a * tx.vectors(t, n) + b * ty.vectors(t, n))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("chain parsing maps the table names") {
  CHECK(TransformChain::parse("LPCC").steps().empty());
  CHECK(TransformChain::parse("LPCC").name() == "LPCC");
  CHECK(TransformChain::parse("LPCC3P").name() == "LPCC3P");
  CHECK(TransformChain::parse("CMS-LW").name() == "CMS+LW");
  CHECK(TransformChain::parse("cms+pf").name() == "CMS+PF");

  // ACW runs first regardless of its listed position.
  CHECK(TransformChain::parse("CMS+ACW").name() == "ACW+CMS");
  CHECK(TransformChain::parse("CMS+ACW+SIGMA").name() == "ACW+CMS+SIGMA");
  CHECK(TransformChain::parse("CMS+ACW+SIGMA").has_sigma());

  CHECK_THROWS_AS(TransformChain::parse("NOPE"), ConfigError);
  CHECK_THROWS_AS(TransformChain::parse("CMS++PF"), ConfigError);
  CHECK_THROWS_AS(TransformChain::parse("ACW+ACW"), ConfigError);
  CHECK_THROWS_AS(TransformChain::parse("SIGMA+SIGMA"), ConfigError);
}

TEST_CASE("apply_chain composes steps in order") {
  frontend::ExtractResult input;
  input.features = random_seq(12, 8, 80);
  input.lpc = Matrix(12, 4);
  Prng prng(81);
  for (std::size_t t = 0; t < 12; ++t) {
    const std::vector<std::complex<double>> poles =
        corpus::random_stable_poles(prng, 4, 0.3, 0.9);
    const std::vector<double> a = corpus::poles_to_ar(poles);
    std::copy(a.begin(), a.end(), input.lpc.row(t).begin());
  }

  SUBCASE("empty chain is the identity") {
    const FeatureSequence out = apply_chain(TransformChain::parse("LPCC"), input);
    CHECK(out.vectors == input.features.vectors);
  }

  SUBCASE("CMS alone zeroes constant sequences") {
    frontend::ExtractResult constant;
    constant.features = seq_of({{1, 2}, {1, 2}});
    const FeatureSequence out =
        apply_chain(TransformChain::parse("CMS"), constant);
    for (std::size_t t = 0; t < 2; ++t) {
      CHECK(out.vectors(t, 0) == doctest::Approx(0.0));
      CHECK(out.vectors(t, 1) == doctest::Approx(0.0));
    }
  }

  SUBCASE("CMS+PF equals the hand-written composition") {
    const FeatureSequence chained =
        apply_chain(TransformChain::parse("CMS+PF"), input);
    const FeatureSequence manual =
        postfilter_weight(cms(input.features), PostfilterParams{1.0, 0.9});
    CHECK(chained.vectors == manual.vectors);
  }

  SUBCASE("ACW chains consume the per-frame LPC") {
    const FeatureSequence chained =
        apply_chain(TransformChain::parse("CMS+ACW"), input);
    const FeatureSequence manual = cms(acw(input.lpc, 8));
    CHECK(chained.vectors == manual.vectors);
  }

  SUBCASE("sigma without fitted weights is rejected") {
    CHECK_THROWS_AS(apply_chain(TransformChain::parse("CMS+SIGMA"), input),
                    ConfigError);
  }

  SUBCASE("chains never change the frame count") {
    for (const char* name :
         {"LPCC", "LPCC3P", "CMS", "ACW", "LW", "BPL", "PF", "CMS+ACW",
          "CMS+PF", "CMS+LW"}) {
      const FeatureSequence out = apply_chain(TransformChain::parse(name), input);
      CHECK(out.frames() == input.features.frames());
    }
  }
}

TEST_CASE("fit_chain_sigma fits on the pre-sigma prefix") {
  std::vector<frontend::ExtractResult> corpus(3);
  for (int i = 0; i < 3; ++i) {
    corpus[static_cast<std::size_t>(i)].features =
        random_seq(25, 6, 90 + static_cast<std::uint64_t>(i));
  }
  const TransformChain chain = TransformChain::parse("CMS+SIGMA");
  const SigmaWeights fitted = transforms::fit_chain_sigma(chain, corpus);
  REQUIRE(fitted.fitted());

  // Applying the full chain to the corpus yields unit pooled spread.
  std::vector<FeatureSequence> out;
  for (const frontend::ExtractResult& fr : corpus) {
    out.push_back(apply_chain(chain, fr, &fitted));
  }
  const SigmaWeights refit = sigma_fit(out);
  for (double w : refit.w) CHECK(w == doctest::Approx(1.0).epsilon(1e-8));

  CHECK_FALSE(transforms::fit_chain_sigma(TransformChain::parse("CMS"), corpus)
                  .fitted());
}

TEST_CASE("cms recovers most of a convolutional channel mismatch") {
  const SynthSpeaker spk = corpus::make_synth_speaker("spk", 31337, 10);
  const AudioClip clean = corpus::synth_utterance(spk, 6.0, 2);
  const AudioClip filtered = corpus::apply_channel(clean, "M3");

  // Huge gate floor keeps every frame so rows align one-to-one.
  FrontendConfig cfg = FrontendConfig::vq_preset();
  cfg.energy_floor_db = 300.0;
  const frontend::ExtractResult a = frontend::extract(clean, cfg);
  const frontend::ExtractResult b = frontend::extract(filtered, cfg);
  REQUIRE(a.features.frames() == b.features.frames());

  const auto mean_l2 = [](const FeatureSequence& x, const FeatureSequence& y) {
    double total = 0.0;
    for (std::size_t t = 0; t < x.frames(); ++t) {
      double d = 0.0;
      for (std::size_t n = 0; n < x.dim(); ++n) {
        const double diff = x.vectors(t, n) - y.vectors(t, n);
        d += diff * diff;
      }
      total += std::sqrt(d);
    }
    return total / static_cast<double>(x.frames());
  };

  const double raw_distance = mean_l2(a.features, b.features);
  const double cms_distance = mean_l2(cms(a.features), cms(b.features));
  CHECK(cms_distance < 0.2 * raw_distance);
}
