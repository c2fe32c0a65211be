// src/config.cpp

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

#include "sprec/config.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "sprec/corpus.hpp"
#include "sprec/transforms.hpp"
#include "sprec/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sprec {

namespace {

// Wraps json access so a bad field reports its name instead of a parser
// backtrace.
template <typename T>
T field(const json& j, const std::string& name, T fallback) {
  if (!j.contains(name)) return fallback;
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + name + "': " + e.what());
  }
}

template <typename T>
T required_field(const json& j, const std::string& name) {
  if (!j.contains(name)) {
    throw ConfigError("config is missing required field '" + name + "'");
  }
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config field '" + name + "': " + e.what());
  }
}

FrontendConfig frontend_from_json(const json& j, const FrontendConfig& preset) {
  FrontendConfig cfg = preset;
  cfg.preemphasis = field(j, "preemphasis", cfg.preemphasis);
  cfg.frame_len = field(j, "frame_len", cfg.frame_len);
  cfg.frame_shift = field(j, "frame_shift", cfg.frame_shift);
  cfg.lpc_order = field(j, "lpc_order", cfg.lpc_order);
  // A bare lpc_order implies cepstral vectors of the same dimension.
  cfg.cepstrum_order = field(j, "cepstrum_order",
                             j.contains("lpc_order") ? cfg.lpc_order
                                                     : preset.cepstrum_order);
  cfg.energy_floor_db = field(j, "energy_floor_db", cfg.energy_floor_db);
  return cfg;
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  cfg.manifest = required_field<std::string>(j, "manifest");
  // Relative manifest paths resolve against the config file location.
  if (!cfg.manifest.empty() && !fs::path(cfg.manifest).is_absolute()) {
    cfg.manifest = (fs::path(path).parent_path() / cfg.manifest).string();
  }

  const json classifier = j.contains("classifier") ? j.at("classifier") : json::object();
  const std::string kind = field<std::string>(classifier, "kind", "vq");
  if (kind == "vq") {
    cfg.classifier.kind = ModelKind::kVq;
    cfg.classifier.frontend = FrontendConfig::vq_preset();
  } else if (kind == "cm") {
    cfg.classifier.kind = ModelKind::kCm;
    cfg.classifier.frontend = FrontendConfig::cm_preset();
  } else {
    throw ConfigError("classifier.kind must be 'vq' or 'cm', got '" + kind + "'");
  }
  cfg.classifier.vq_bits = field(classifier, "bits", cfg.classifier.vq_bits);
  cfg.classifier.cm_ridge_scale =
      field(classifier, "ridge", cfg.classifier.cm_ridge_scale);
  cfg.classifier.frontend = frontend_from_json(
      j.contains("frontend") ? j.at("frontend") : json::object(),
      frontend_from_json(classifier, cfg.classifier.frontend));

  cfg.chains = required_field<std::vector<std::string>>(j, "chains");

  const json scenarios = required_field<json>(j, "scenarios");
  if (!scenarios.is_array() || scenarios.empty()) {
    throw ConfigError("config field 'scenarios' must be a non-empty array");
  }
  for (const json& s : scenarios) {
    Scenario scenario;
    scenario.name = required_field<std::string>(s, "name");
    scenario.train_filter =
        ConditionFilter::parse(required_field<std::string>(s, "train"));
    scenario.test_filter =
        ConditionFilter::parse(required_field<std::string>(s, "test"));
    cfg.scenarios.push_back(std::move(scenario));
  }

  cfg.options.cohort_size = field(j, "cohort_size", cfg.options.cohort_size);
  cfg.options.master_seed = field<std::uint64_t>(j, "master_seed", cfg.options.master_seed);
  cfg.options.threads = field(j, "threads", cfg.options.threads);

  const json output = j.contains("output") ? j.at("output") : json::object();
  cfg.output.dir = field<std::string>(output, "dir", cfg.output.dir);
  if (!fs::path(cfg.output.dir).is_absolute()) {
    cfg.output.dir = (fs::path(path).parent_path() / cfg.output.dir).string();
  }
  cfg.output.decimal_comma = field(output, "decimal_comma", cfg.output.decimal_comma);

  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  if (manifest.empty()) throw ConfigError("manifest path is empty");
  if (chains.empty()) throw ConfigError("chain list is empty");
  for (const std::string& name : chains) TransformChain::parse(name);
  if (scenarios.empty()) throw ConfigError("scenario list is empty");
  if (options.cohort_size < 1) throw ConfigError("cohort_size must be >= 1");
  if (options.threads < 0) throw ConfigError("threads must be >= 0");
  if (classifier.kind == ModelKind::kVq &&
      (classifier.vq_bits < 0 || classifier.vq_bits > 16)) {
    throw ConfigError("classifier.bits out of range");
  }
  if (classifier.cm_ridge_scale < 0.0) {
    throw ConfigError("classifier.ridge must be >= 0");
  }
  classifier.frontend.validate();
  if (output.dir.empty()) throw ConfigError("output.dir is empty");
}

ExperimentResult run_experiment_config(const ExperimentConfig& config) {
  config.validate();
  const Manifest manifest = corpus::load_manifest(config.manifest);
  ExperimentResult result = eval::run_experiment(
      manifest, config.scenarios, config.chains, config.classifier, config.options);

  fs::create_directories(config.output.dir);
  const fs::path dir(config.output.dir);
  eval::write_identification_csv(result.identification,
                                 (dir / "identification.csv").string());
  eval::write_eer_csv(result.eer, (dir / "eer.csv").string());

  const std::string kind = model_kind_name(config.classifier.kind);
  std::ofstream id_txt(dir / "identification.txt", std::ios::binary);
  id_txt << eval::render_text_table(
      result.identification,
      "Identification rates (%), classifier " + kind, config.output.decimal_comma);
  std::ofstream eer_txt(dir / "eer.txt", std::ios::binary);
  eer_txt << eval::render_text_table(
      result.eer, "EER (%) (with cohorts = " + std::to_string(config.options.cohort_size) +
                      " / without), classifier " + kind,
      config.output.decimal_comma);
  if (!id_txt || !eer_txt) throw DataError("short write under " + config.output.dir);
  return result;
}

}  // namespace sprec
