// tests/support/fixtures.hpp

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

// Small models and signals shared by the unit tests.

#pragma once

#include <cmath>
#include <filesystem>
#include <memory>
#include <numbers>
#include <random>
#include <string>

#include "camo/asr/backend.hpp"
#include "camo/asr/train.hpp"
#include "camo/audio/waveform.hpp"
#include "camo/predictor/predictor.hpp"

namespace camo::fixture {

inline AsrModel tiny_asr_model(std::uint64_t seed) {
  AsrArchitecture arch;
  arch.conv1_channels = 4;
  arch.conv2_channels = 4;
  arch.hidden = 16;
  arch.rnn_layers = 1;
  return make_asr(arch, seed);
}

inline std::shared_ptr<ReferenceAsr> tiny_asr(std::uint64_t seed = 1) {
  return std::make_shared<ReferenceAsr>(tiny_asr_model(seed), "tiny");
}

inline PredictorArchitecture tiny_predictor_arch() { return PredictorArchitecture::scaled(16); }

/// Sum of a few tones plus noise, peak-normalized to `peak`.
inline Waveform speechlike(double seconds, unsigned seed, float peak = 0.8f) {
  const auto n = static_cast<std::size_t>(seconds * kSampleRate);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> f(150, 3000), u(-1, 1);
  const double f1 = f(rng), f2 = f(rng), f3 = f(rng);
  Waveform w = Waveform::zeros(static_cast<std::int64_t>(n));
  float m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / kSampleRate;
    const double env = 0.6 + 0.4 * std::sin(2 * std::numbers::pi * 3 * t);
    w.samples[i] = static_cast<float>(env * (std::sin(2 * std::numbers::pi * f1 * t) +
                                             0.5 * std::sin(2 * std::numbers::pi * f2 * t) +
                                             0.3 * std::sin(2 * std::numbers::pi * f3 * t)) +
                                      0.05 * u(rng));
    m = std::max(m, std::fabs(w.samples[i]));
  }
  for (auto& s : w.samples) s *= peak / m;
  return w;
}

/// Unique scratch directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("camo_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace camo::fixture
