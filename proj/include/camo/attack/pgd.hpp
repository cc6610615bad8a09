// camo/attack/pgd.hpp

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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <ATen/core/Tensor.h>
#include <nlohmann/json.hpp>

#include "camo/asr/backend.hpp"
#include "camo/attack/perturbation.hpp"
#include "camo/stream/plan.hpp"

namespace camo {

struct PgdConfig {
  int steps = 10;
  double step_fraction = 0.2;  // of epsilon
  double multiplier = 0.008;

  void validate() const;
  nlohmann::json to_json() const;
  static PgdConfig from_json(const nlohmann::json& j);
};

/// Called after every projection with the current [B, N] iterate.
using PgdObserver = std::function<void(int step, const at::Tensor& alpha)>;

/// Untargeted l-inf PGD from alpha = 0:
///   alpha <- clip(alpha + step * sign(grad_alpha L(x + alpha, y)), -eps, eps)
/// `eps` is a [B] float tensor. Samples past each item's length stay zero.
at::Tensor pgd_batch(AsrBackend& asr, const at::Tensor& clean, std::span<const std::int64_t> lengths,
                     const std::vector<std::vector<int>>& targets, const at::Tensor& eps, const PgdConfig& cfg,
                     const PgdObserver& observer = {});

/// Whole-utterance attack against the true transcript. Non-causal: it sees
/// the full waveform, and eps comes from the full-utterance peak.
Perturbation pgd_offline(AsrBackend& asr, const Waveform& w, const std::string& transcript, const PgdConfig& cfg,
                         const PgdObserver& observer = {});

std::vector<Perturbation> pgd_offline_batch(AsrBackend& asr, const std::vector<const Waveform*>& batch,
                                            const std::vector<std::string>& transcripts, const PgdConfig& cfg);

/// Attacks the trailing context window against the model's own greedy
/// transcription of it and plays the last r seconds of that perturbation.
class OnlinePgdGenerator : public ChunkGenerator {
 public:
  OnlinePgdGenerator(AsrBackend& asr, PgdConfig cfg, PgdObserver observer = {});
  Provenance provenance() const override { return Provenance::kPgdOnline; }
  Perturbation generate(std::span<const float> observed, const ChunkRequest& req) override;

 private:
  AsrBackend& asr_;
  PgdConfig cfg_;
  PgdObserver observer_;
};

ScheduleResult pgd_online(AsrBackend& asr, const Waveform& stream, const StreamClock& clock, const PgdConfig& cfg,
                          const PgdObserver& observer = {});

/// Fresh uniform noise per chunk; the context is ignored.
class UniformNoiseGenerator : public ChunkGenerator {
 public:
  explicit UniformNoiseGenerator(std::uint64_t seed) : seed_(seed) {}
  Provenance provenance() const override { return Provenance::kUniform; }
  Perturbation generate(std::span<const float> observed, const ChunkRequest& req) override;

 private:
  std::uint64_t seed_;
};

}  // namespace camo
