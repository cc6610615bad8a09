// src/cli/config.cpp

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

#include "camo/cli/config.hpp"

#include <fstream>

#include "camo/asr/model.hpp"
#include "camo/core/digest.hpp"
#include "camo/core/error.hpp"
#include "camo/predictor/predictor.hpp"

namespace camo {

nlohmann::json RunConfig::defaults() {
  return {
      {"seed", 1},
      {"output_dir", "runs/default"},
      {"data",
       {{"manifest", ""}, {"train_split", "train"}, {"test_split", "test"}, {"max_train", 0}, {"max_test", 0}, {"heldout_fraction", 0.1}}},
      {"asr",
       {{"architecture", AsrArchitecture{}.to_json()},
        {"train", {{"epochs", 10}, {"batch_size", 16}, {"lr", 1e-3}, {"lr_decay", 0.95}, {"grad_clip", 10.0}, {"keep_best", true}}},
        {"decoder", "greedy"},
        {"lm", {{"order", 4}, {"weight", 0.5}, {"word_bonus", 0.0}, {"beam_width", 8}}}}},
      {"predictor",
       {{"architecture", PredictorArchitecture::scaled(8).to_json()},
        {"train",
         {{"epochs", 4},
          {"batch_size", 32},
          {"lr", 1.5e-4},
          {"gamma", 0.99},
          {"momentum", 0.9},
          {"optimizer", "sgd"}}}}},
      {"advtrain",
       {{"max_epochs", 4},
        {"batch_size", 32},
        {"lr", 3e-4},
        {"pgd_steps", 3},
        {"step_fraction", 0.2},
        {"target_attacked_cer", -1.0},
        {"max_clean_cer", -1.0}}},
      {"denoiser", {{"over_subtraction", 2.0}, {"min_gain", 0.1}, {"quiet_fraction", 0.1}}},
      {"attack",
       {{"kind", "predictive"},
        {"m", 0.008},
        {"delta", 0.5},
        {"r", 0.5},
        {"context", 2.0},
        {"epsilon_binding", "causal"},
        {"pgd", {{"steps", 10}, {"step_fraction", 0.2}, {"steps_denoised", 30}}}}},
      {"defense", "none"},
      {"evaluate",
       {{"attacks", {"none", "uniform", "pgd-online", "predictive", "pgd-offline"}},
        {"defenses", {"none"}},
        {"timing_runs", 20},
        {"timing_warmup", 2},
        {"per_word", true},
        {"swap", false}}},
      {"sweep", {{"kind", "delay"}, {"values", {0.5, 0.75, 1.0}}, {"retrain", false}, {"seeds", {1, 2, 3}}}},
      {"synth",
       {{"num_utterances", 500},
        {"num_speakers", 20},
        {"test_fraction", 0.2},
        {"min_duration", 4.0},
        {"max_duration", 6.0},
        {"noise_min", 0.0005},
        {"noise_max", 0.003},
        {"formant_spread", 0.12},
        {"rate_spread", 0.15}}},
  };
}

RunConfig::RunConfig() : j_(defaults()) {}

RunConfig RunConfig::load(const std::optional<std::filesystem::path>& file) {
  RunConfig c;
  if (!file) return c;
  std::ifstream is(*file);
  if (!is) throw UsageError("config file '" + file->string() + "' not found");
  nlohmann::json user;
  try {
    user = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file '" + file->string() + "' is not valid JSON: " + e.what());
  }
  if (!user.is_object()) throw UsageError("config file '" + file->string() + "' must hold a JSON object");
  const auto flat = user.flatten();
  for (const auto& item : flat.items()) {
    const auto ptr = nlohmann::json::json_pointer(item.key());
    // arrays are replaced wholesale below
    bool known = c.j_.contains(ptr);
    if (!known) {
      auto parent = ptr;
      while (!parent.empty() && !c.j_.contains(parent)) parent = parent.parent_pointer();
      known = !parent.empty() && c.j_[parent].is_array();
    }
    if (!known) throw UsageError("config file '" + file->string() + "': unknown key '" + item.key() + "'");
  }
  c.j_.merge_patch(user);
  return c;
}

namespace {

nlohmann::json::json_pointer pointer_of(const std::string& dotted) {
  std::string p;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    const auto dot = dotted.find('.', start);
    p += "/" + dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return nlohmann::json::json_pointer(p);
}

}  // namespace

void RunConfig::set_json(const std::string& dotted_key, const nlohmann::json& value) {
  const auto ptr = pointer_of(dotted_key);
  if (!j_.contains(ptr)) throw UsageError("unknown config key '" + dotted_key + "'");
  j_[ptr] = value;
}

void RunConfig::set(const std::string& dotted_key, const std::string& value) {
  nlohmann::json v;
  try {
    v = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception&) {
    v = value;
  }
  set_json(dotted_key, v);
}

const nlohmann::json& RunConfig::at(const std::string& dotted_key) const {
  const auto ptr = pointer_of(dotted_key);
  if (!j_.contains(ptr)) throw UsageError("unknown config key '" + dotted_key + "'");
  return j_.at(ptr);
}

std::uint64_t RunConfig::seed() const { return j_.at("seed").get<std::uint64_t>(); }

std::filesystem::path RunConfig::output_dir() const { return j_.at("output_dir").get<std::string>(); }

std::string RunConfig::digest() const { return sha256_hex(j_.dump()); }

RunDir::RunDir(std::filesystem::path r) : root(std::move(r)) {}

void RunDir::freeze(const RunConfig& cfg, const std::string& command) const {
  namespace fs = std::filesystem;
  fs::create_directories(checkpoints());
  fs::create_directories(reports());
  fs::create_directories(logs());
  const auto path = root / "config.frozen";
  if (fs::exists(path)) {
    int n = 1;
    while (fs::exists(root / ("config.frozen." + std::to_string(n)))) ++n;
    fs::rename(path, root / ("config.frozen." + std::to_string(n)));
  }
  std::ofstream os(path);
  if (!os) throw UsageError("cannot write '" + path.string() + "'");
  nlohmann::json j = cfg.json();
  j["_command"] = command;
  j["_digest"] = cfg.digest();
  os << j.dump(2) << '\n';
}

}  // namespace camo
