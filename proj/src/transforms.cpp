// src/transforms.cpp

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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <stdexcept>

#include "sprec/util.hpp"

namespace sprec {

void PostfilterParams::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError(str_printf("postfilter alpha %.3f outside (0,1]", alpha));
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw ConfigError(str_printf("postfilter beta %.3f outside (0,1)", beta));
  }
  if (!(alpha > beta)) {
    throw ConfigError(
        str_printf("postfilter requires alpha > beta (got %.3f, %.3f)", alpha, beta));
  }
}

TransformChain::TransformChain(std::vector<ChainStep> steps)
    : steps_(std::move(steps)) {}

TransformChain TransformChain::parse(const std::string& name) {
  static const std::map<std::string, std::vector<StepKind>> token_map = {
      {"LPCC", {}},
      {"LPCC3P", {StepKind::kDropLow2}},
      {"LPCC3..P", {StepKind::kDropLow2}},
      {"LPCC_3P", {StepKind::kDropLow2}},
      {"CMS", {StepKind::kCms}},
      {"ACW", {StepKind::kAcw}},
      {"ACW-LPCC", {StepKind::kAcw}},
      {"LW", {StepKind::kLinearWeight}},
      {"LW-LPCC", {StepKind::kLinearWeight}},
      {"CMS-LW", {StepKind::kCms, StepKind::kLinearWeight}},
      {"BPL", {StepKind::kBandpassLifter}},
      {"BPL-LPCC", {StepKind::kBandpassLifter}},
      {"SIGMA", {StepKind::kSigma}},
      {"SIGMA-LPCC", {StepKind::kSigma}},
      {"PF", {StepKind::kPostfilter}},
      {"PF-LPCC", {StepKind::kPostfilter}},
  };

  std::vector<ChainStep> steps;
  std::size_t start = 0;
  const std::string upper = [&] {
    std::string u = name;
    std::transform(u.begin(), u.end(), u.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return u;
  }();
  while (start <= upper.size()) {
    std::size_t plus = upper.find('+', start);
    if (plus == std::string::npos) plus = upper.size();
    const std::string token = upper.substr(start, plus - start);
    start = plus + 1;
    if (token.empty()) {
      if (upper.empty()) break;
      throw ConfigError("empty token in chain name '" + name + "'");
    }
    const auto it = token_map.find(token);
    if (it == token_map.end()) {
      throw ConfigError("unknown parameterization token '" + token +
                        "' in chain name '" + name + "'");
    }
    for (StepKind kind : it->second) steps.push_back(ChainStep{kind, {}, 0, -1.0});
    if (start > upper.size()) break;
  }

  // ACW is computed from LPC polynomials, not from cepstra: hoist it to the
  // front so the remaining steps run over ACW cepstra.
  const std::size_t acw_count = static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(),
                    [](const ChainStep& s) { return s.kind == StepKind::kAcw; }));
  if (acw_count > 1) {
    throw ConfigError("chain '" + name + "' lists ACW more than once");
  }
  if (acw_count == 1 && steps.front().kind != StepKind::kAcw) {
    std::erase_if(steps, [](const ChainStep& s) { return s.kind == StepKind::kAcw; });
    steps.insert(steps.begin(), ChainStep{StepKind::kAcw, {}, 0, -1.0});
  }
  const std::size_t sigma_count = static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(),
                    [](const ChainStep& s) { return s.kind == StepKind::kSigma; }));
  if (sigma_count > 1) {
    throw ConfigError("chain '" + name + "' lists SIGMA more than once");
  }
  return TransformChain(std::move(steps));
}

std::string TransformChain::name() const {
  if (steps_.empty()) return "LPCC";
  std::string out;
  for (const ChainStep& s : steps_) {
    if (!out.empty()) out += '+';
    switch (s.kind) {
      case StepKind::kDropLow2: out += "LPCC3P"; break;
      case StepKind::kCms: out += "CMS"; break;
      case StepKind::kAcw: out += "ACW"; break;
      case StepKind::kLinearWeight: out += "LW"; break;
      case StepKind::kBandpassLifter: out += "BPL"; break;
      case StepKind::kSigma: out += "SIGMA"; break;
      case StepKind::kPostfilter: out += "PF"; break;
    }
  }
  return out;
}

bool TransformChain::has_sigma() const {
  return std::any_of(steps_.begin(), steps_.end(),
                     [](const ChainStep& s) { return s.kind == StepKind::kSigma; });
}

bool TransformChain::has_acw() const {
  return std::any_of(steps_.begin(), steps_.end(),
                     [](const ChainStep& s) { return s.kind == StepKind::kAcw; });
}

namespace transforms {

FeatureSequence drop_low2(const FeatureSequence& seq) {
  const std::size_t q = seq.dim();
  if (q < 3) {
    throw std::invalid_argument(
        str_printf("drop_low2: need dimension >= 3, got %zu", q));
  }
  FeatureSequence out;
  out.meta = seq.meta;
  out.vectors = Matrix(seq.frames(), q - 2);
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    for (std::size_t n = 2; n < q; ++n) out.vectors(t, n - 2) = seq.vectors(t, n);
  }
  return out;
}

FeatureSequence cms(const FeatureSequence& seq) {
  FeatureSequence out = seq;
  const std::size_t t = seq.frames();
  if (t == 0) {
    log_warn("cms: empty feature sequence left unchanged");
    return out;
  }
  const std::size_t q = seq.dim();
  std::vector<double> mean(q, 0.0);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t n = 0; n < q; ++n) mean[n] += seq.vectors(i, n);
  }
  for (std::size_t n = 0; n < q; ++n) mean[n] /= static_cast<double>(t);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t n = 0; n < q; ++n) out.vectors(i, n) -= mean[n];
  }
  return out;
}

FeatureSequence acw(const Matrix& lpc_frames, int q) {
  if (q < 1) throw std::invalid_argument("acw: q must be >= 1");
  const std::size_t p = lpc_frames.cols();
  FeatureSequence out;
  out.vectors = Matrix(lpc_frames.rows(), static_cast<std::size_t>(q));

  // Monic numerator N(u)/P = 1 + sum_{n=1..P-1} ((P-n)/P) a_n u^n.
  std::vector<double> numer(p > 0 ? p - 1 : 0);
  for (std::size_t f = 0; f < lpc_frames.rows(); ++f) {
    const std::span<const double> a = lpc_frames.row(f);
    for (std::size_t n = 1; n < p; ++n) {
      numer[n - 1] = (static_cast<double>(p - n) / static_cast<double>(p)) * a[n - 1];
    }
    const std::vector<double> c_pole = frontend::lpc_to_lpcc(a, q);
    if (numer.empty()) {
      std::copy(c_pole.begin(), c_pole.end(), out.vectors.row(f).begin());
      continue;
    }
    // The recursion gives the cepstrum of 1/N; a numerator contributes the
    // negative of that.
    const std::vector<double> c_inv_numer = frontend::lpc_to_lpcc(numer, q);
    for (int n = 0; n < q; ++n) {
      out.vectors(f, static_cast<std::size_t>(n)) = c_pole[n] - c_inv_numer[n];
    }
  }
  return out;
}

FeatureSequence linear_weight(const FeatureSequence& seq) {
  FeatureSequence out = seq;
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    for (std::size_t n = 0; n < seq.dim(); ++n) {
      out.vectors(t, n) *= static_cast<double>(n + 1);
    }
  }
  return out;
}

FeatureSequence bandpass_lifter(const FeatureSequence& seq, int l, double h) {
  const int q = static_cast<int>(seq.dim());
  if (l == 0) l = q;
  if (l != q) {
    throw std::invalid_argument(
        str_printf("bandpass_lifter: window length %d must equal dimension %d", l, q));
  }
  if (h < 0.0) h = static_cast<double>(l);
  FeatureSequence out = seq;
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    for (int n = 1; n <= q; ++n) {
      out.vectors(t, static_cast<std::size_t>(n - 1)) *=
          1.0 + 0.5 * h * std::sin(M_PI * n / l);
    }
  }
  return out;
}

SigmaWeights sigma_fit(std::span<const FeatureSequence> corpus) {
  if (corpus.empty()) throw std::invalid_argument("sigma_fit: empty corpus");
  const std::size_t q = corpus.front().dim();
  // Welford's streaming moments, accumulated in corpus order.
  std::vector<double> mean(q, 0.0), m2(q, 0.0);
  std::size_t count = 0;
  for (const FeatureSequence& seq : corpus) {
    if (seq.dim() != q) {
      throw std::invalid_argument("sigma_fit: inconsistent feature dimensions");
    }
    for (std::size_t t = 0; t < seq.frames(); ++t) {
      ++count;
      for (std::size_t n = 0; n < q; ++n) {
        const double x = seq.vectors(t, n);
        const double delta = x - mean[n];
        mean[n] += delta / static_cast<double>(count);
        m2[n] += delta * (x - mean[n]);
      }
    }
  }
  if (count < 2) {
    throw std::invalid_argument(
        str_printf("sigma_fit: need >= 2 pooled frames, got %zu", count));
  }
  constexpr double kSigmaFloor = 1e-8;
  SigmaWeights weights;
  weights.w.resize(q);
  for (std::size_t n = 0; n < q; ++n) {
    const double sigma = std::sqrt(m2[n] / static_cast<double>(count));
    weights.w[n] = 1.0 / std::max(sigma, kSigmaFloor);
  }
  return weights;
}

FeatureSequence sigma_apply(const FeatureSequence& seq, const SigmaWeights& w) {
  if (w.w.size() != seq.dim()) {
    throw std::invalid_argument(
        str_printf("sigma_apply: weight dimension %zu != feature dimension %zu",
                   w.w.size(), seq.dim()));
  }
  FeatureSequence out = seq;
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    for (std::size_t n = 0; n < seq.dim(); ++n) out.vectors(t, n) *= w.w[n];
  }
  return out;
}

FeatureSequence postfilter_weight(const FeatureSequence& seq, PostfilterParams p) {
  p.validate();
  FeatureSequence out = seq;
  std::vector<double> weight(seq.dim());
  double an = 1.0, bn = 1.0;
  for (std::size_t n = 0; n < seq.dim(); ++n) {
    an *= p.alpha;
    bn *= p.beta;
    weight[n] = an - bn;
  }
  for (std::size_t t = 0; t < seq.frames(); ++t) {
    for (std::size_t n = 0; n < seq.dim(); ++n) out.vectors(t, n) *= weight[n];
  }
  return out;
}

namespace {

FeatureSequence apply_steps(std::span<const ChainStep> steps,
                            const frontend::ExtractResult& input,
                            const SigmaWeights* sigma) {
  FeatureSequence seq;
  std::size_t i = 0;
  if (!steps.empty() && steps.front().kind == StepKind::kAcw) {
    if (input.lpc.cols() == 0) {
      throw std::invalid_argument("apply_chain: ACW requires per-frame LPC");
    }
    seq = acw(input.lpc, static_cast<int>(input.features.dim()));
    seq.meta = input.features.meta;
    i = 1;
  } else {
    seq = input.features;
  }
  for (; i < steps.size(); ++i) {
    const ChainStep& s = steps[i];
    switch (s.kind) {
      case StepKind::kDropLow2:
        seq = drop_low2(seq);
        break;
      case StepKind::kCms:
        seq = cms(seq);
        break;
      case StepKind::kAcw:
        throw std::invalid_argument("apply_chain: ACW must be the first step");
      case StepKind::kLinearWeight:
        seq = linear_weight(seq);
        break;
      case StepKind::kBandpassLifter:
        seq = bandpass_lifter(seq, s.bpl_len, s.bpl_h);
        break;
      case StepKind::kSigma:
        if (sigma == nullptr || !sigma->fitted()) {
          throw ConfigError("apply_chain: SIGMA step requires fitted weights");
        }
        seq = sigma_apply(seq, *sigma);
        break;
      case StepKind::kPostfilter:
        seq = postfilter_weight(seq, s.pf);
        break;
    }
  }
  return seq;
}

}  // namespace

FeatureSequence apply_chain(const TransformChain& chain,
                            const frontend::ExtractResult& input,
                            const SigmaWeights* sigma) {
  return apply_steps(chain.steps(), input, sigma);
}

SigmaWeights fit_chain_sigma(const TransformChain& chain,
                             std::span<const frontend::ExtractResult> corpus) {
  if (!chain.has_sigma()) return {};
  std::span<const ChainStep> steps = chain.steps();
  std::size_t sigma_pos = 0;
  while (steps[sigma_pos].kind != StepKind::kSigma) ++sigma_pos;
  std::vector<FeatureSequence> transformed;
  transformed.reserve(corpus.size());
  for (const frontend::ExtractResult& fr : corpus) {
    transformed.push_back(apply_steps(steps.subspan(0, sigma_pos), fr, nullptr));
  }
  return sigma_fit(transformed);
}

}  // namespace transforms
}  // namespace sprec
