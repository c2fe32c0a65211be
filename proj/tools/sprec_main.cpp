// tools/sprec_main.cpp

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

#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sprec/config.hpp"
#include "sprec/corpus.hpp"
#include "sprec/eval.hpp"
#include "sprec/frontend.hpp"
#include "sprec/models.hpp"
#include "sprec/transforms.hpp"
#include "sprec/util.hpp"

namespace fs = std::filesystem;
using namespace sprec;

namespace {

// Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 partial experiment failure.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    const std::string piece = s.substr(start, comma - start);
    if (!piece.empty()) out.push_back(piece);
    start = comma + 1;
    if (comma == s.size()) break;
  }
  return out;
}

FrontendConfig frontend_for(const std::string& preset, int order, int ceps) {
  FrontendConfig cfg;
  if (preset == "vq") {
    cfg = FrontendConfig::vq_preset();
  } else if (preset == "cm") {
    cfg = FrontendConfig::cm_preset();
  } else {
    throw ConfigError("preset must be 'vq' or 'cm', got '" + preset + "'");
  }
  if (order > 0) {
    cfg.lpc_order = order;
    cfg.cepstrum_order = order;
  }
  if (ceps > 0) cfg.cepstrum_order = ceps;
  return cfg;
}

// Loads every *.spkm under a directory, sorted by filename.
std::vector<SpeakerModel> load_model_dir(const std::string& dir) {
  std::vector<fs::path> paths;
  if (!fs::is_directory(dir)) throw DataError(dir + " is not a directory");
  for (const fs::directory_entry& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".spkm") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw DataError("no .spkm model files under " + dir);
  std::vector<SpeakerModel> models;
  models.reserve(paths.size());
  for (const fs::path& p : paths) models.push_back(models::load_model(p.string()));
  for (const SpeakerModel& m : models) {
    if (m.kind != models.front().kind || m.chain_name != models.front().chain_name) {
      throw DataError("model directory mixes kinds or chains: " + dir);
    }
  }
  return models;
}

FeatureSequence features_for_model(const SpeakerModel& model,
                                   const std::string& wav_path,
                                   const FrontendConfig& cfg) {
  const AudioClip clip = corpus::decode_audio(wav_path);
  frontend::ExtractResult fr = frontend::extract(clip, cfg);
  const TransformChain chain = TransformChain::parse(model.chain_name);
  return transforms::apply_chain(chain, fr,
                                 model.sigma.fitted() ? &model.sigma : nullptr);
}

int cmd_simulate(const std::string& out_dir, int speakers,
                 const std::string& sessions, const std::string& channels,
                 const std::string& languages, double train_s, double test_s,
                 int tests, std::uint64_t seed) {
  corpus::SynthCorpusParams params;
  params.out_dir = out_dir;
  params.n_speakers = speakers;
  params.sessions = split_commas(sessions);
  params.channels = split_commas(channels);
  params.languages = split_commas(languages);
  params.train_duration_s = train_s;
  params.test_duration_s = test_s;
  params.tests_per_condition = tests;
  params.master_seed = seed;
  const Manifest manifest = corpus::build_synth_corpus(params);
  std::cout << "manifest: " << (fs::path(out_dir) / "manifest.tsv").string() << "\n"
            << "speakers: " << speakers << "\n"
            << "utterances: " << manifest.records.size() << "\n";
  return kExitOk;
}

int cmd_extract(const std::string& in_path, const std::string& out_path,
                const std::string& preset, int order, int ceps) {
  const FrontendConfig cfg = frontend_for(preset, order, ceps);
  const AudioClip clip = corpus::decode_audio(in_path);
  const frontend::ExtractResult fr = frontend::extract(clip, cfg);
  frontend::save_features(out_path, fr);
  std::cout << "frames: " << fr.features.frames() << "\n"
            << "dimension: " << fr.features.dim() << "\n"
            << "gated: " << fr.frames_gated << "\n"
            << "degenerate: " << fr.frames_degenerate << "\n";
  return kExitOk;
}

int cmd_train(const std::string& manifest_path, const std::string& filter_expr,
              const std::string& classifier, const std::string& chain_name,
              const std::string& out_dir, int bits, double ridge, int order,
              int ceps, std::uint64_t seed) {
  const Manifest manifest = corpus::load_manifest(manifest_path);
  const ConditionFilter filter = ConditionFilter::parse(filter_expr);
  const TransformChain chain = TransformChain::parse(chain_name);
  const FrontendConfig cfg = frontend_for(classifier, order, ceps);

  std::map<std::string, std::vector<frontend::ExtractResult>> per_speaker;
  for (const UtteranceRecord& rec : manifest.records) {
    if (rec.key.role != Role::kTrain || !filter.matches(rec.key)) continue;
    const AudioClip clip = corpus::decode_audio(manifest.resolve(rec));
    frontend::ExtractResult fr = frontend::extract(clip, cfg);
    fr.features.meta = rec.key;
    per_speaker[rec.key.speaker].push_back(std::move(fr));
  }
  if (per_speaker.empty()) {
    throw DataError("no training utterances match filter '" + filter_expr + "'");
  }

  // Merge multi-utterance speakers, then fit sigma on the pooled corpus.
  std::vector<frontend::ExtractResult> merged;
  std::vector<std::string> speaker_ids;
  for (auto& [spk, parts] : per_speaker) {
    frontend::ExtractResult all = std::move(parts.front());
    for (std::size_t i = 1; i < parts.size(); ++i) {
      for (std::size_t t = 0; t < parts[i].features.frames(); ++t) {
        all.features.vectors.append_row(parts[i].features.vectors.row(t));
        all.lpc.append_row(parts[i].lpc.row(t));
      }
    }
    merged.push_back(std::move(all));
    speaker_ids.push_back(spk);
  }
  const SigmaWeights sigma = transforms::fit_chain_sigma(chain, merged);
  const SigmaWeights* sigma_ptr = chain.has_sigma() ? &sigma : nullptr;

  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < merged.size(); ++i) {
    SpeakerModel model;
    model.id = speaker_ids[i];
    model.chain_name = chain_name;
    model.sigma = sigma;
    const FeatureSequence feats = transforms::apply_chain(chain, merged[i], sigma_ptr);
    if (classifier == "vq") {
      model.kind = ModelKind::kVq;
      model.vq = models::train_vq_random(feats, bits,
                                         mix_seed({seed, hash_str(model.id)}));
    } else {
      model.kind = ModelKind::kCm;
      model.cm = models::train_cov_relative(feats, ridge);
    }
    const std::string path =
        (fs::path(out_dir) / (model.id + ".spkm")).string();
    models::save_model(path, model);
    std::cout << "wrote " << path << "\n";
  }
  return kExitOk;
}

int cmd_identify(const std::string& models_dir, const std::string& wav_path,
                 const std::string& preset, int order, int ceps, bool verbose) {
  const std::vector<SpeakerModel> models = load_model_dir(models_dir);
  const FrontendConfig cfg = frontend_for(preset, order, ceps);
  const FeatureSequence feats = features_for_model(models.front(), wav_path, cfg);
  const std::vector<double> scores = models::score_all(models, feats);
  std::size_t best = 0;
  for (std::size_t i = 1; i < models.size(); ++i) {
    if (scores[i] < scores[best] ||
        (scores[i] == scores[best] && models[i].id < models[best].id)) {
      best = i;
    }
  }
  if (verbose) {
    for (std::size_t i = 0; i < models.size(); ++i) {
      std::cout << models[i].id << "\t" << str_printf("%.6f", scores[i]) << "\n";
    }
  }
  std::cout << models[best].id << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& models_dir, const std::string& wav_path,
               const std::string& claim, const std::string& preset, int order,
               int ceps, int cohort_size, const std::string& manifest_path,
               const std::string& train_filter_expr) {
  const std::vector<SpeakerModel> models = load_model_dir(models_dir);
  const FrontendConfig cfg = frontend_for(preset, order, ceps);
  const FeatureSequence feats = features_for_model(models.front(), wav_path, cfg);
  const std::vector<double> scores = models::score_all(models, feats);

  std::size_t claim_index = models.size();
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (models[i].id == claim) claim_index = i;
  }
  if (claim_index == models.size()) {
    throw DataError("claimed speaker " + claim + " has no model in " + models_dir);
  }
  std::cout << "raw: " << str_printf("%.6f", scores[claim_index]) << "\n";

  if (cohort_size > 0) {
    // VQ cohort selection ranks codebooks on the claimant's training
    // features, which have to be re-extracted from the manifest.
    FeatureSequence claimant_train;
    const FeatureSequence* claimant_train_ptr = nullptr;
    if (models.front().kind == ModelKind::kVq) {
      if (manifest_path.empty()) {
        throw ConfigError(
            "verify with cohorts on VQ models needs --manifest (and optionally "
            "--train-filter) to recover the claimant's training features");
      }
      const Manifest manifest = corpus::load_manifest(manifest_path);
      const ConditionFilter filter = ConditionFilter::parse(train_filter_expr);
      const TransformChain chain = TransformChain::parse(models.front().chain_name);
      const SigmaWeights& sigma = models[claim_index].sigma;
      bool found = false;
      for (const UtteranceRecord& rec : manifest.records) {
        if (rec.key.role != Role::kTrain || rec.key.speaker != claim ||
            !filter.matches(rec.key)) {
          continue;
        }
        const AudioClip clip = corpus::decode_audio(manifest.resolve(rec));
        frontend::ExtractResult fr = frontend::extract(clip, cfg);
        FeatureSequence f = transforms::apply_chain(
            chain, fr, sigma.fitted() ? &sigma : nullptr);
        if (!found) {
          claimant_train = std::move(f);
          found = true;
        } else {
          for (std::size_t t = 0; t < f.frames(); ++t) {
            claimant_train.vectors.append_row(f.vectors.row(t));
          }
        }
      }
      if (!found) {
        throw DataError("no training utterances for claimant " + claim +
                        " in manifest");
      }
      claimant_train_ptr = &claimant_train;
    }
    const std::vector<std::string> cohort =
        eval::select_cohort(models, claim, cohort_size, claimant_train_ptr);
    std::vector<double> cohort_scores;
    for (const std::string& member : cohort) {
      for (std::size_t i = 0; i < models.size(); ++i) {
        if (models[i].id == member) cohort_scores.push_back(scores[i]);
      }
    }
    std::cout << "normalized: "
              << str_printf("%.6f",
                            eval::normalize_score(scores[claim_index], cohort_scores))
              << "\n";
  }
  return kExitOk;
}

int cmd_experiment(const std::string& config_path, const std::string& manifest_override,
                   const std::string& out_override, std::int64_t seed_override,
                   int threads_override) {
  ExperimentConfig config = ExperimentConfig::load(config_path);
  if (!manifest_override.empty()) config.manifest = manifest_override;
  if (!out_override.empty()) config.output.dir = out_override;
  if (seed_override >= 0) {
    config.options.master_seed = static_cast<std::uint64_t>(seed_override);
  }
  if (threads_override >= 0) config.options.threads = threads_override;

  const ExperimentResult result = run_experiment_config(config);
  std::cout << eval::render_text_table(result.identification,
                                       "Identification rates (%)",
                                       config.output.decimal_comma)
            << "\n"
            << eval::render_text_table(
                   result.eer,
                   "EER (%) (with cohorts = " +
                       std::to_string(config.options.cohort_size) + " / without)",
                   config.output.decimal_comma);
  std::cout << "results written to " << config.output.dir << "\n";
  if (result.failed_cells > 0) {
    log_error(str_printf("%d cell(s) failed", result.failed_cells));
    return kExitPartial;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speaker identification and verification experiments over LPCC features"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic corpus");
  std::string sim_out, sim_sessions = "S1", sim_channels = "M1", sim_languages = "c";
  int sim_speakers = 8, sim_tests = 5;
  double sim_train_s = 60.0, sim_test_s = 2.0;
  std::uint64_t sim_seed = 1;
  simulate->add_option("--out", sim_out, "Output directory")->required();
  simulate->add_option("--speakers", sim_speakers, "Number of speakers");
  simulate->add_option("--sessions", sim_sessions, "Comma-separated session labels");
  simulate->add_option("--channels", sim_channels,
                       "Comma-separated channel ids (M1, M2, M3)");
  simulate->add_option("--languages", sim_languages, "Comma-separated language labels");
  simulate->add_option("--train-sec", sim_train_s, "Training utterance duration");
  simulate->add_option("--test-sec", sim_test_s, "Test utterance duration");
  simulate->add_option("--tests", sim_tests, "Test utterances per condition");
  simulate->add_option("--seed", sim_seed, "Master seed");

  // extract
  auto* extract = app.add_subcommand("extract", "Extract LPCC features from a WAV file");
  std::string ext_in, ext_out, ext_preset = "vq";
  int ext_order = 0, ext_ceps = 0;
  extract->add_option("--in", ext_in, "Input WAV (8 or 16 kHz mono PCM16)")->required();
  extract->add_option("--out", ext_out, "Output feature file")->required();
  extract->add_option("--preset", ext_preset, "Classifier preset: vq (P=16) or cm (P=20)");
  extract->add_option("--order", ext_order, "LPC order override");
  extract->add_option("--ceps", ext_ceps, "Cepstrum order override");

  // train
  auto* train = app.add_subcommand("train", "Enroll speaker models from a manifest");
  std::string tr_manifest, tr_filter, tr_classifier = "vq", tr_chain = "LPCC", tr_out;
  int tr_bits = 6, tr_order = 0, tr_ceps = 0;
  double tr_ridge = 1e-6;
  std::uint64_t tr_seed = 1;
  train->add_option("--manifest", tr_manifest, "Manifest path")->required();
  train->add_option("--filter", tr_filter,
                    "Training condition filter, e.g. session=S1,microphone=M1");
  train->add_option("--classifier", tr_classifier, "vq or cm");
  train->add_option("--chain", tr_chain, "Parameterization chain name");
  train->add_option("--out", tr_out, "Output model directory")->required();
  train->add_option("--bits", tr_bits, "VQ codebook bits");
  train->add_option("--ridge", tr_ridge, "CM ridge scale");
  train->add_option("--order", tr_order, "LPC order override");
  train->add_option("--ceps", tr_ceps, "Cepstrum order override");
  train->add_option("--seed", tr_seed, "Codebook sampling seed");

  // identify
  auto* identify = app.add_subcommand("identify", "Closed-set identification of a WAV file");
  std::string id_models, id_in, id_preset = "vq";
  int id_order = 0, id_ceps = 0;
  bool id_verbose = false;
  identify->add_option("--models", id_models, "Model directory")->required();
  identify->add_option("--in", id_in, "Input WAV")->required();
  identify->add_option("--preset", id_preset, "Front-end preset matching the models");
  identify->add_option("--order", id_order, "LPC order override");
  identify->add_option("--ceps", id_ceps, "Cepstrum order override");
  identify->add_flag("--scores", id_verbose, "Print per-model scores");

  // verify
  auto* verify = app.add_subcommand("verify", "Score a claimed identity for a WAV file");
  std::string ve_models, ve_in, ve_claim, ve_preset = "vq", ve_manifest, ve_filter;
  int ve_order = 0, ve_ceps = 0, ve_cohort = 0;
  verify->add_option("--models", ve_models, "Model directory")->required();
  verify->add_option("--in", ve_in, "Input WAV")->required();
  verify->add_option("--claim", ve_claim, "Claimed speaker id")->required();
  verify->add_option("--preset", ve_preset, "Front-end preset matching the models");
  verify->add_option("--order", ve_order, "LPC order override");
  verify->add_option("--ceps", ve_ceps, "Cepstrum order override");
  verify->add_option("--cohort", ve_cohort, "Cohort size (0 = raw score only)");
  verify->add_option("--manifest", ve_manifest, "Manifest (VQ cohort selection)");
  verify->add_option("--train-filter", ve_filter, "Training filter for cohort features");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a configured experiment");
  std::string ex_config, ex_manifest, ex_out;
  std::int64_t ex_seed = -1;
  int ex_threads = -1;
  experiment->add_option("--config", ex_config, "JSON experiment config")->required();
  experiment->add_option("--manifest", ex_manifest, "Override manifest path");
  experiment->add_option("--out", ex_out, "Override output directory");
  experiment->add_option("--seed", ex_seed, "Override master seed");
  experiment->add_option("--threads", ex_threads, "Override worker thread count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return cmd_simulate(sim_out, sim_speakers, sim_sessions, sim_channels,
                          sim_languages, sim_train_s, sim_test_s, sim_tests, sim_seed);
    }
    if (extract->parsed()) {
      return cmd_extract(ext_in, ext_out, ext_preset, ext_order, ext_ceps);
    }
    if (train->parsed()) {
      return cmd_train(tr_manifest, tr_filter, tr_classifier, tr_chain, tr_out,
                       tr_bits, tr_ridge, tr_order, tr_ceps, tr_seed);
    }
    if (identify->parsed()) {
      return cmd_identify(id_models, id_in, id_preset, id_order, id_ceps, id_verbose);
    }
    if (verify->parsed()) {
      return cmd_verify(ve_models, ve_in, ve_claim, ve_preset, ve_order, ve_ceps,
                        ve_cohort, ve_manifest, ve_filter);
    }
    if (experiment->parsed()) {
      return cmd_experiment(ex_config, ex_manifest, ex_out, ex_seed, ex_threads);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}
