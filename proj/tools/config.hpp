// Copyright 2026 The fqf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Flat key = value configuration with dotted sections.
//
//   # comment
//   command = simulate
//   model = dot
//   [model]
//   gamma_L = 1        -> key "model.gamma_L"
//
// Keys are case sensitive. Values are kept as trimmed text; typed accessors
// raise ConfigError on malformed input. No expressions are evaluated.

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fqf::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_real(const std::string& key) const;
  double get_real(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<double> get_real_list(const std::string& key) const;
  /// Row-major complex entries: "1", "-0.5", "2i", "0.5-1.5i".
  std::vector<std::complex<double>> get_complex_list(const std::string& key) const;

  /// Keys under "<prefix>." with the prefix stripped.
  std::map<std::string, std::string> section(const std::string& prefix) const;

  /// Keys never read through an accessor (typos, unsupported options).
  std::vector<std::string> unused_keys() const;

  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

  /// Canonical text: one "key = value" line per entry, sorted by key.
  std::string dump() const;

 private:
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

double parse_real(const std::string& text);
std::complex<double> parse_complex(const std::string& text);

}  // namespace fqf::cli
