// include/sprec/util.hpp

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

#ifndef SPREC_UTIL_HPP_
#define SPREC_UTIL_HPP_

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sprec {

// Bad user-supplied configuration (CLI exit code 1).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or missing input data (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class LogLevel { kDebug = 0, kInfo, kWarn, kError, kQuiet };

// Threshold read once from the SPREC_LOG environment variable
// (debug|info|warn|error|quiet). Defaults to warn.
LogLevel log_level();

void log_debug(const std::string& msg);
void log_info(const std::string& msg);
void log_warn(const std::string& msg);
void log_error(const std::string& msg);

// SplitMix64 generator. Used everywhere a seeded random stream is needed so
// results do not depend on the standard library's distribution
// implementations.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);

  // Unbiased index in [0, n). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  // Standard normal via Box-Muller, one spare cached.
  double normal();

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Deterministic combination of seed components (SplitMix64 chaining).
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

// FNV-1a, for folding string labels into seeds.
std::uint64_t hash_str(std::string_view s);

// printf-style helper; the project avoids <format> for toolchain reach.
std::string str_printf(const char* fmt, ...);

}  // namespace sprec

#endif  // SPREC_UTIL_HPP_
