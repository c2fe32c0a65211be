// src/keys.cpp

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

#include "sprec/keys.hpp"

#include "sprec/util.hpp"

namespace sprec {

std::string role_name(Role r) { return r == Role::kTrain ? "train" : "test"; }

Role parse_role(const std::string& s) {
  if (s == "train") return Role::kTrain;
  if (s == "test") return Role::kTest;
  throw DataError("unknown role '" + s + "' (expected train or test)");
}

std::string ConditionKey::to_string() const {
  return str_printf("(%s %s %s %s %s %d)", speaker.c_str(), session.c_str(),
                    microphone.c_str(), language.c_str(),
                    role_name(role).c_str(), index);
}

namespace {

std::set<std::string> split_values(const std::string& s) {
  std::set<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t bar = s.find('|', start);
    const std::string piece =
        s.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
    if (!piece.empty()) out.insert(piece);
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return out;
}

}  // namespace

ConditionFilter ConditionFilter::parse(const std::string& expr) {
  ConditionFilter f;
  f.expr_ = expr;
  std::size_t start = 0;
  while (start < expr.size()) {
    std::size_t comma = expr.find(',', start);
    if (comma == std::string::npos) comma = expr.size();
    const std::string clause = expr.substr(start, comma - start);
    start = comma + 1;
    if (clause.empty()) continue;
    const std::size_t eq = clause.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("filter clause '" + clause + "' is missing '=' in '" +
                        expr + "'");
    }
    const std::string field = clause.substr(0, eq);
    const std::set<std::string> values = split_values(clause.substr(eq + 1));
    if (values.empty()) {
      throw ConfigError("filter clause '" + clause + "' has no values");
    }
    if (field == "speaker") {
      f.speakers_ = values;
    } else if (field == "session") {
      f.sessions_ = values;
    } else if (field == "microphone" || field == "mic") {
      f.microphones_ = values;
    } else if (field == "language" || field == "lang") {
      f.languages_ = values;
    } else {
      throw ConfigError("unknown filter field '" + field +
                        "' (expected speaker, session, microphone, language)");
    }
  }
  return f;
}

bool ConditionFilter::matches(const ConditionKey& key) const {
  if (!speakers_.empty() && !speakers_.count(key.speaker)) return false;
  if (!sessions_.empty() && !sessions_.count(key.session)) return false;
  if (!microphones_.empty() && !microphones_.count(key.microphone)) return false;
  if (!languages_.empty() && !languages_.count(key.language)) return false;
  return true;
}

}  // namespace sprec
