// camo/cli/config.hpp

// Copyright 2026 The camo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace camo {

/// Resolved run configuration: built-in defaults, then a JSON config file,
/// then command-line overrides (later wins). Keys are addressed with dots,
/// e.g. "attack.m" or "predictor.train.epochs".
class RunConfig {
 public:
  static nlohmann::json defaults();

  RunConfig();
  /// Defaults merged with `file` when given. Throws UsageError when the file
  /// is missing or not valid JSON.
  static RunConfig load(const std::optional<std::filesystem::path>& file);

  /// Overrides one existing key. `value` is parsed as JSON when it parses,
  /// otherwise taken as a string. Unknown keys throw UsageError.
  void set(const std::string& dotted_key, const std::string& value);
  void set_json(const std::string& dotted_key, const nlohmann::json& value);
  const nlohmann::json& at(const std::string& dotted_key) const;

  const nlohmann::json& json() const { return j_; }

  std::uint64_t seed() const;
  std::filesystem::path output_dir() const;

  /// SHA-256 of the canonical JSON dump.
  std::string digest() const;

 private:
  nlohmann::json j_;
};

/// Run directory: config.frozen, checkpoints/, reports/, logs/.
struct RunDir {
  std::filesystem::path root;

  explicit RunDir(std::filesystem::path r);
  std::filesystem::path checkpoints() const { return root / "checkpoints"; }
  std::filesystem::path reports() const { return root / "reports"; }
  std::filesystem::path logs() const { return root / "logs"; }

  /// Creates the layout and writes the resolved config. A previous frozen
  /// config is kept as config.frozen.<n>.
  void freeze(const RunConfig& cfg, const std::string& command) const;
};

}  // namespace camo
