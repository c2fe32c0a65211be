// include/sprec/config.hpp

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

#ifndef SPREC_CONFIG_HPP_
#define SPREC_CONFIG_HPP_

#include <string>
#include <vector>

#include "sprec/eval.hpp"

namespace sprec {

struct OutputConfig {
  std::string dir = "results";
  bool decimal_comma = false;
};

// Declarative description of one experiment run (JSON on disk). See the
// README for the schema; classifier presets fill the front-end fields that
// are not spelled out.
struct ExperimentConfig {
  std::string manifest;
  ClassifierConfig classifier;
  std::vector<std::string> chains;
  std::vector<Scenario> scenarios;
  ExperimentOptions options;
  OutputConfig output;

  static ExperimentConfig load(const std::string& path);  // throws ConfigError
  void validate() const;                                  // throws ConfigError
};

// Loads the manifest, runs the experiment, and writes
// identification.{csv,txt} and eer.{csv,txt} under config.output.dir.
ExperimentResult run_experiment_config(const ExperimentConfig& config);

}  // namespace sprec

#endif  // SPREC_CONFIG_HPP_
