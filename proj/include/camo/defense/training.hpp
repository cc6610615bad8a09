// camo/defense/training.hpp

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
#include <utility>
#include <vector>

#include <ATen/core/Tensor.h>
#include <nlohmann/json.hpp>

#include "camo/asr/backend.hpp"
#include "camo/asr/train.hpp"
#include "camo/data/dataset.hpp"
#include "camo/predictor/predictor.hpp"
#include "camo/stream/plan.hpp"

namespace camo {

/// Predictor optimization settings. lr at epoch k is lr * gamma^k.
struct TrainConfig {
  int epochs = 4;
  int batch_size = 32;
  double lr = 1.5e-4;
  double gamma = 0.99;
  double momentum = 0.9;
  std::string optimizer = "sgd";  // "sgd" or "adam"
  std::uint64_t seed = 1;
  double multiplier = 0.008;
  StreamClock clock;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

double learning_rate_at(const TrainConfig& cfg, int epoch);

/// Perturbation the predictor produces for a whole utterance under the
/// scheduler timeline, as one differentiable [B, N] tensor. Slot k uses the
/// context [t_k - c, t_k) and fills [t_k + d, t_k + d + r). `eps` is [B].
at::Tensor predictive_perturbation(PredictorModel& model, const at::Tensor& samples,
                                   std::span<const std::int64_t> lengths, const at::Tensor& eps,
                                   const StreamClock& clock);

struct PredictorTrainReport {
  std::vector<EpochLog> epochs;  // heldout_* measured on the attacked target
  double initial_heldout_loss = 0.0;
};

/// Gradient ascent on the target's CTC loss w.r.t. the predictor only.
/// `target` stays frozen (its parameters receive no gradient and no
/// update); wrap it in DenoisedAsr to train through a denoiser. Uses the
/// full-utterance eps. Throws CapabilityError for black-box targets.
PredictorTrainReport train_predictor(PredictorModel& model, AsrBackend& target, const Dataset& train,
                                     const Dataset& heldout, const TrainConfig& cfg,
                                     const std::function<void(const EpochLog&)>& on_epoch = {});

/// Copy of `base` trained against a defended target.
PredictorModel retrain_predictor_for(AsrBackend& defended_target, PredictorModel& base, const Dataset& train,
                                     const Dataset& heldout, const TrainConfig& cfg,
                                     const std::function<void(const EpochLog&)>& on_epoch = {});

PredictorModel clone_predictor(PredictorModel& model);

/// Mean attacked CTC loss of `target` on `data` with full-utterance eps.
double attacked_loss(PredictorModel& model, AsrBackend& target, const Dataset& data, double multiplier,
                     const StreamClock& clock, int batch_size = 16);

/// (clean, attacked) counts for a batch: half attacked, rounding down.
std::pair<int, int> split_clean_attacked(int batch_size);

struct AdvTrainConfig {
  int max_epochs = 10;
  int batch_size = 32;
  double lr = 3e-4;
  int pgd_steps = 3;
  double step_fraction = 0.2;
  double multiplier = 0.008;
  std::uint64_t seed = 1;
  /// Stop once held-out 3-step-PGD CER falls to this (negative: never).
  double target_attacked_cer = -1.0;
  /// Stop once held-out clean CER rises above this (negative: never).
  double max_clean_cer = -1.0;

  void validate() const;
  nlohmann::json to_json() const;
  static AdvTrainConfig from_json(const nlohmann::json& j);
};

struct AdvEpochLog {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double heldout_clean_cer = 0.0;
  double heldout_attacked_cer = 0.0;
  nlohmann::json to_json() const;
};

struct AdvTrainReport {
  std::vector<AdvEpochLog> epochs;
  std::string stop_reason;
};

/// Fine-tunes `model` in place on batches that are half clean and half
/// attacked with PGD against the current parameters.
AdvTrainReport adversarial_train_asr(AsrModel& model, const Dataset& train, const Dataset& heldout,
                                     const AdvTrainConfig& cfg,
                                     const std::function<void(const AdvEpochLog&)>& on_epoch = {});

AsrModel clone_asr(AsrModel& model);

}  // namespace camo
