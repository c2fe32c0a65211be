// src/eval.cpp

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

#include "sprec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <map>
#include <sstream>
#include <thread>

#include "sprec/transforms.hpp"
#include "sprec/util.hpp"

namespace sprec {

bool ResultTable::all_ok() const {
  return std::all_of(cells.begin(), cells.end(),
                     [](const Cell& c) { return c.ok; });
}

namespace eval {

double identification_rate(
    std::span<const std::pair<std::string, std::string>> decisions) {
  if (decisions.empty()) {
    throw std::invalid_argument("identification_rate: no decisions");
  }
  std::size_t correct = 0;
  for (const auto& [predicted, truth] : decisions) {
    if (predicted == truth) ++correct;
  }
  return 100.0 * static_cast<double>(correct) /
         static_cast<double>(decisions.size());
}

std::vector<std::string> select_cohort(const std::vector<SpeakerModel>& models,
                                       const std::string& claimant, int size,
                                       const FeatureSequence* claimant_train) {
  if (size < 1) throw std::invalid_argument("select_cohort: size must be >= 1");
  if (static_cast<std::size_t>(size) >= models.size()) {
    throw std::invalid_argument(str_printf(
        "select_cohort: size %d needs more than %zu models", size, models.size()));
  }
  const auto claimant_it =
      std::find_if(models.begin(), models.end(),
                   [&](const SpeakerModel& m) { return m.id == claimant; });
  if (claimant_it == models.end()) {
    throw std::invalid_argument("select_cohort: unknown claimant " + claimant);
  }

  std::vector<std::pair<double, std::string>> ranked;
  ranked.reserve(models.size() - 1);
  for (const SpeakerModel& m : models) {
    if (m.id == claimant) continue;
    double d;
    if (m.kind == ModelKind::kCm) {
      d = models::sphericity(m.cm, claimant_it->cm);
    } else {
      if (claimant_train == nullptr) {
        throw std::invalid_argument(
            "select_cohort: VQ cohort selection needs the claimant's training features");
      }
      d = models::vq_score(m.vq, *claimant_train);
    }
    ranked.emplace_back(d, m.id);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<std::string> cohort;
  cohort.reserve(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) cohort.push_back(ranked[static_cast<std::size_t>(i)].second);
  return cohort;
}

double normalize_score(double raw, std::span<const double> cohort_scores) {
  if (cohort_scores.empty()) {
    throw std::invalid_argument("normalize_score: empty cohort");
  }
  double mean = 0.0;
  for (double s : cohort_scores) mean += s;
  mean /= static_cast<double>(cohort_scores.size());
  return raw - mean;
}

double compute_eer(std::span<const double> client, std::span<const double> impostor) {
  if (client.empty() || impostor.empty()) {
    throw std::invalid_argument("compute_eer: empty score list");
  }
  std::vector<double> c(client.begin(), client.end());
  std::vector<double> i(impostor.begin(), impostor.end());
  std::sort(c.begin(), c.end());
  std::sort(i.begin(), i.end());

  std::vector<double> thresholds;
  thresholds.reserve(c.size() + i.size());
  thresholds.insert(thresholds.end(), c.begin(), c.end());
  thresholds.insert(thresholds.end(), i.begin(), i.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  // Operating points at every distinct threshold; FAR rises, FRR falls.
  double prev_far = 0.0, prev_frr = 1.0;  // theta below every score
  for (double theta : thresholds) {
    const double far =
        static_cast<double>(std::upper_bound(i.begin(), i.end(), theta) - i.begin()) /
        static_cast<double>(i.size());
    const double frr =
        static_cast<double>(c.end() - std::upper_bound(c.begin(), c.end(), theta)) /
        static_cast<double>(c.size());
    const double diff = far - frr;
    if (diff >= 0.0) {
      if (diff == 0.0) return 100.0 * far;
      const double prev_diff = prev_far - prev_frr;  // < 0 here
      const double t = -prev_diff / (diff - prev_diff);
      return 100.0 * (prev_far + t * (far - prev_far));
    }
    prev_far = far;
    prev_frr = frr;
  }
  // FAR never reached FRR within the swept range; the crossing sits at the
  // top end where both curves meet FAR = 1, FRR = 0.
  return 100.0 * prev_far;
}

namespace {

struct CellResult {
  Cell identification;
  Cell eer;
};

struct PreparedData {
  // One merged training ExtractResult per speaker plus per-utterance test
  // features, all produced from the shared extraction cache.
  std::vector<std::string> speakers;
  std::map<std::string, frontend::ExtractResult> train;
  std::vector<const UtteranceRecord*> tests;
};

frontend::ExtractResult merge_extracts(
    const std::vector<const frontend::ExtractResult*>& parts) {
  frontend::ExtractResult merged;
  merged.features.vectors = Matrix(0, parts.front()->features.dim());
  merged.lpc = Matrix(0, parts.front()->lpc.cols());
  merged.features.meta = parts.front()->features.meta;
  for (const frontend::ExtractResult* part : parts) {
    for (std::size_t t = 0; t < part->features.frames(); ++t) {
      merged.features.vectors.append_row(part->features.vectors.row(t));
      merged.lpc.append_row(part->lpc.row(t));
    }
    merged.frames_total += part->frames_total;
    merged.frames_gated += part->frames_gated;
    merged.frames_degenerate += part->frames_degenerate;
  }
  return merged;
}

CellResult run_cell(const TransformChain& chain, const PreparedData& data,
                    const std::map<std::string, frontend::ExtractResult>& cache,
                    const Manifest& manifest, const ClassifierConfig& classifier,
                    const ExperimentOptions& options, std::uint64_t cell_seed) {
  CellResult out;

  // Fit the sigma step (when present) on the pooled training corpus.
  std::vector<frontend::ExtractResult> train_pool;
  train_pool.reserve(data.speakers.size());
  for (const std::string& spk : data.speakers) train_pool.push_back(data.train.at(spk));
  const SigmaWeights sigma = transforms::fit_chain_sigma(chain, train_pool);
  const SigmaWeights* sigma_ptr = chain.has_sigma() ? &sigma : nullptr;

  // Enroll.
  std::vector<SpeakerModel> models;
  std::map<std::string, FeatureSequence> train_features;
  for (const std::string& spk : data.speakers) {
    SpeakerModel model;
    model.id = spk;
    model.kind = classifier.kind;
    model.chain_name = chain.name();
    model.sigma = sigma;
    FeatureSequence feats =
        transforms::apply_chain(chain, data.train.at(spk), sigma_ptr);
    if (classifier.kind == ModelKind::kVq) {
      model.vq = models::train_vq_random(
          feats, classifier.vq_bits, mix_seed({cell_seed, hash_str(spk)}));
    } else {
      model.cm = models::train_cov_relative(feats, classifier.cm_ridge_scale);
    }
    train_features.emplace(spk, std::move(feats));
    models.push_back(std::move(model));
  }

  // Cohorts depend only on the models, not on the test utterance.
  std::map<std::string, std::vector<std::size_t>> cohorts;
  std::map<std::string, std::size_t> model_index;
  for (std::size_t i = 0; i < models.size(); ++i) model_index[models[i].id] = i;
  for (const std::string& spk : data.speakers) {
    const std::vector<std::string> cohort = select_cohort(
        models, spk, options.cohort_size, &train_features.at(spk));
    std::vector<std::size_t> indices;
    indices.reserve(cohort.size());
    for (const std::string& member : cohort) indices.push_back(model_index.at(member));
    cohorts.emplace(spk, std::move(indices));
  }

  // Score every test utterance against every model once; identification and
  // all verification claims reuse the same score vector.
  std::vector<std::pair<std::string, std::string>> decisions;
  std::vector<TrialScore> trials;
  trials.reserve(data.tests.size() * models.size());
  for (const UtteranceRecord* rec : data.tests) {
    const frontend::ExtractResult& extracted = cache.at(manifest.resolve(*rec));
    const FeatureSequence feats =
        transforms::apply_chain(chain, extracted, sigma_ptr);
    if (feats.frames() == 0) {
      throw DataError("no frames survived analysis for " + rec->path);
    }
    const std::vector<double> scores = models::score_all(models, feats);

    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
      if (scores[i] < scores[best] ||
          (scores[i] == scores[best] && models[i].id < models[best].id)) {
        best = i;
      }
    }
    decisions.emplace_back(models[best].id, rec->key.speaker);

    for (std::size_t i = 0; i < models.size(); ++i) {
      TrialScore trial;
      trial.claimed = models[i].id;
      trial.true_id = rec->key.speaker;
      trial.raw = scores[i];
      std::vector<double> cohort_scores;
      cohort_scores.reserve(cohorts.at(models[i].id).size());
      for (std::size_t member : cohorts.at(models[i].id)) {
        cohort_scores.push_back(scores[member]);
      }
      trial.normalized = normalize_score(trial.raw, cohort_scores);
      trials.push_back(std::move(trial));
    }
  }

  std::vector<double> genuine_raw, impostor_raw, genuine_norm, impostor_norm;
  for (const TrialScore& trial : trials) {
    const bool genuine = trial.claimed == trial.true_id;
    (genuine ? genuine_raw : impostor_raw).push_back(trial.raw);
    (genuine ? genuine_norm : impostor_norm).push_back(*trial.normalized);
  }

  out.identification.ok = true;
  out.identification.value = identification_rate(decisions);
  out.eer.ok = true;
  out.eer.has_pair = true;
  out.eer.value = compute_eer(genuine_norm, impostor_norm);
  out.eer.value2 = compute_eer(genuine_raw, impostor_raw);
  return out;
}

template <typename Task>
void run_in_waves(std::vector<Task>& tasks, int threads) {
  const unsigned hw = std::thread::hardware_concurrency();
  const std::size_t width = threads > 0 ? static_cast<std::size_t>(threads)
                                        : std::max(1u, hw);
  for (std::size_t start = 0; start < tasks.size(); start += width) {
    const std::size_t stop = std::min(tasks.size(), start + width);
    std::vector<std::future<void>> wave;
    wave.reserve(stop - start);
    for (std::size_t i = start; i < stop; ++i) {
      wave.push_back(std::async(std::launch::async, tasks[i]));
    }
    for (std::future<void>& f : wave) f.get();
  }
}

}  // namespace

ExperimentResult run_experiment(const Manifest& manifest,
                                const std::vector<Scenario>& scenarios,
                                const std::vector<std::string>& chains,
                                const ClassifierConfig& classifier,
                                const ExperimentOptions& options) {
  if (scenarios.empty()) throw ConfigError("no scenarios configured");
  if (chains.empty()) throw ConfigError("no parameterization chains configured");
  classifier.frontend.validate();

  std::vector<TransformChain> parsed;
  parsed.reserve(chains.size());
  for (const std::string& name : chains) parsed.push_back(TransformChain::parse(name));

  const std::vector<std::string> speakers = manifest.speakers();
  if (speakers.empty()) throw DataError("manifest has no utterances");
  if (options.cohort_size >= static_cast<int>(speakers.size())) {
    throw ConfigError(str_printf(
        "cohort_size %d requires more than %zu enrolled speakers",
        options.cohort_size, speakers.size()));
  }

  // Extract every utterance any scenario touches, once.
  std::map<std::string, frontend::ExtractResult> cache;
  {
    std::vector<const UtteranceRecord*> needed;
    std::map<std::string, const UtteranceRecord*> by_path;
    for (const UtteranceRecord& rec : manifest.records) {
      const bool used = std::any_of(
          scenarios.begin(), scenarios.end(), [&](const Scenario& s) {
            return rec.key.role == Role::kTrain ? s.train_filter.matches(rec.key)
                                                : s.test_filter.matches(rec.key);
          });
      if (!used) continue;
      const std::string path = manifest.resolve(rec);
      if (by_path.emplace(path, &rec).second) needed.push_back(&rec);
    }
    for (const UtteranceRecord* rec : needed) {
      cache.emplace(manifest.resolve(*rec), frontend::ExtractResult{});
    }
    std::vector<std::function<void()>> tasks;
    tasks.reserve(needed.size());
    for (const UtteranceRecord* rec : needed) {
      tasks.push_back([rec, &manifest, &classifier, &cache] {
        const std::string path = manifest.resolve(*rec);
        AudioClip clip = corpus::decode_audio(path);
        frontend::ExtractResult fr = frontend::extract(clip, classifier.frontend);
        fr.features.meta = rec->key;
        cache.at(path) = std::move(fr);
      });
    }
    run_in_waves(tasks, options.threads);
  }

  // Per-scenario data preparation (train merge + test listing).
  std::vector<PreparedData> prepared(scenarios.size());
  std::vector<std::string> scenario_errors(scenarios.size());
  for (std::size_t sj = 0; sj < scenarios.size(); ++sj) {
    const Scenario& scenario = scenarios[sj];
    PreparedData& data = prepared[sj];
    data.speakers = speakers;
    std::map<std::string, std::vector<const frontend::ExtractResult*>> per_speaker;
    for (const UtteranceRecord& rec : manifest.records) {
      if (rec.key.role == Role::kTrain && scenario.train_filter.matches(rec.key)) {
        per_speaker[rec.key.speaker].push_back(&cache.at(manifest.resolve(rec)));
      } else if (rec.key.role == Role::kTest &&
                 scenario.test_filter.matches(rec.key)) {
        data.tests.push_back(&rec);
      }
    }
    for (const std::string& spk : speakers) {
      const auto it = per_speaker.find(spk);
      if (it == per_speaker.end()) {
        scenario_errors[sj] =
            "no training utterance for speaker " + spk + " under filter '" +
            scenario.train_filter.expression() + "'";
        break;
      }
      data.train.emplace(spk, merge_extracts(it->second));
    }
    if (scenario_errors[sj].empty() && data.tests.empty()) {
      scenario_errors[sj] = "no test utterances under filter '" +
                            scenario.test_filter.expression() + "'";
    }
  }

  ExperimentResult result;
  for (ResultTable* table : {&result.identification, &result.eer}) {
    table->row_names = chains;
    for (const Scenario& s : scenarios) table->col_names.push_back(s.name);
    table->cells.assign(chains.size() * scenarios.size(), Cell{});
  }

  std::vector<std::function<void()>> tasks;
  tasks.reserve(chains.size() * scenarios.size());
  for (std::size_t ci = 0; ci < chains.size(); ++ci) {
    for (std::size_t sj = 0; sj < scenarios.size(); ++sj) {
      tasks.push_back([&, ci, sj] {
        Cell& id_cell = result.identification.at(ci, sj);
        Cell& eer_cell = result.eer.at(ci, sj);
        if (!scenario_errors[sj].empty()) {
          id_cell.error = scenario_errors[sj];
          eer_cell.error = scenario_errors[sj];
          return;
        }
        try {
          const std::uint64_t cell_seed = mix_seed(
              {options.master_seed, static_cast<std::uint64_t>(ci),
               static_cast<std::uint64_t>(sj)});
          const CellResult cell = run_cell(parsed[ci], prepared[sj], cache,
                                           manifest, classifier, options, cell_seed);
          id_cell = cell.identification;
          eer_cell = cell.eer;
        } catch (const std::exception& e) {
          id_cell.error = e.what();
          eer_cell.error = e.what();
          log_warn(str_printf("cell (%s, %s) failed: %s", chains[ci].c_str(),
                              scenarios[sj].name.c_str(), e.what()));
        }
      });
    }
  }
  run_in_waves(tasks, options.threads);

  for (const Cell& cell : result.identification.cells) {
    if (!cell.ok) ++result.failed_cells;
  }
  return result;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void write_identification_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "chain";
  for (const std::string& col : table.col_names) out << ',' << csv_escape(col);
  out << '\n';
  for (std::size_t r = 0; r < table.row_names.size(); ++r) {
    out << csv_escape(table.row_names[r]);
    for (std::size_t c = 0; c < table.col_names.size(); ++c) {
      const Cell& cell = table.at(r, c);
      out << ',' << (cell.ok ? str_printf("%.6f", cell.value) : "NA");
    }
    out << '\n';
  }
  if (!out) throw DataError("short write to " + path);
}

void write_eer_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path + " for writing");
  out << "chain";
  for (const std::string& col : table.col_names) {
    out << ',' << csv_escape(col + "_cohort") << ',' << csv_escape(col + "_raw");
  }
  out << '\n';
  for (std::size_t r = 0; r < table.row_names.size(); ++r) {
    out << csv_escape(table.row_names[r]);
    for (std::size_t c = 0; c < table.col_names.size(); ++c) {
      const Cell& cell = table.at(r, c);
      if (cell.ok) {
        out << ',' << str_printf("%.6f", cell.value) << ','
            << str_printf("%.6f", cell.value2);
      } else {
        out << ",NA,NA";
      }
    }
    out << '\n';
  }
  if (!out) throw DataError("short write to " + path);
}

namespace {

std::string format_cell(const Cell& cell, bool decimal_comma) {
  if (!cell.ok) return "FAILED";
  std::string s = cell.has_pair
                      ? str_printf("%.2f / %.2f", cell.value, cell.value2)
                      : str_printf("%.1f", cell.value);
  if (decimal_comma) {
    for (char& c : s) {
      if (c == '.') c = ',';
    }
  }
  return s;
}

}  // namespace

std::string render_text_table(const ResultTable& table, const std::string& title,
                              bool decimal_comma) {
  std::vector<std::size_t> widths;
  widths.push_back(std::string("PARAMETERIZ.").size());
  for (const std::string& row : table.row_names) {
    widths[0] = std::max(widths[0], row.size());
  }
  for (std::size_t c = 0; c < table.col_names.size(); ++c) {
    std::size_t w = table.col_names[c].size();
    for (std::size_t r = 0; r < table.row_names.size(); ++r) {
      w = std::max(w, format_cell(table.at(r, c), decimal_comma).size());
    }
    widths.push_back(w);
  }

  std::ostringstream out;
  out << title << '\n';
  out << str_printf("%-*s", static_cast<int>(widths[0]), "PARAMETERIZ.");
  for (std::size_t c = 0; c < table.col_names.size(); ++c) {
    out << "  "
        << str_printf("%*s", static_cast<int>(widths[c + 1]),
                      table.col_names[c].c_str());
  }
  out << '\n';
  for (std::size_t r = 0; r < table.row_names.size(); ++r) {
    out << str_printf("%-*s", static_cast<int>(widths[0]),
                      table.row_names[r].c_str());
    for (std::size_t c = 0; c < table.col_names.size(); ++c) {
      out << "  "
          << str_printf("%*s", static_cast<int>(widths[c + 1]),
                        format_cell(table.at(r, c), decimal_comma).c_str());
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace eval
}  // namespace sprec
