// include/sprec/keys.hpp

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

#ifndef SPREC_KEYS_HPP_
#define SPREC_KEYS_HPP_

#include <set>
#include <string>

namespace sprec {

enum class Role { kTrain, kTest };

std::string role_name(Role r);
Role parse_role(const std::string& s);  // throws DataError

// Identifies one utterance's recording condition. (speaker, session,
// microphone, language, index) must be unique within a manifest.
struct ConditionKey {
  std::string speaker;
  std::string session;
  std::string microphone;
  std::string language;
  Role role = Role::kTrain;
  int index = 0;

  std::string to_string() const;

  friend bool operator==(const ConditionKey&, const ConditionKey&) = default;
};

// Conjunction of per-field value sets parsed from strings like
// "session=S4,microphone=M1|M2,language=c". An absent field matches
// anything; the empty string matches everything. Field aliases:
// "mic" == "microphone", "lang" == "language".
class ConditionFilter {
 public:
  ConditionFilter() = default;

  static ConditionFilter parse(const std::string& expr);  // throws ConfigError

  bool matches(const ConditionKey& key) const;
  const std::string& expression() const { return expr_; }

 private:
  std::set<std::string> speakers_, sessions_, microphones_, languages_;
  std::string expr_;
};

}  // namespace sprec

#endif  // SPREC_KEYS_HPP_
