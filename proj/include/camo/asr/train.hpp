// camo/asr/train.hpp

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
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "camo/asr/backend.hpp"
#include "camo/asr/model.hpp"
#include "camo/data/dataset.hpp"

namespace camo {

/// Seeds the torch generator from `seed` and builds a fresh model, so
/// initialization is reproducible.
AsrModel make_asr(const AsrArchitecture& arch, std::uint64_t seed);

struct AsrTrainConfig {
  int epochs = 30;
  int batch_size = 16;
  double lr = 1e-3;
  double lr_decay = 0.95;  // per epoch
  double grad_clip = 10.0;
  std::uint64_t seed = 1;
  /// Restore the epoch with the lowest held-out CER (needs a held-out set).
  bool keep_best = true;

  nlohmann::json to_json() const;
  static AsrTrainConfig from_json(const nlohmann::json& j);
};

/// One line of the per-epoch metrics log.
struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double heldout_loss = 0.0;
  double heldout_cer = 0.0;
  nlohmann::json to_json() const;
};

struct AsrTrainReport {
  int skipped = 0;  // alignment-infeasible training utterances
  std::vector<EpochLog> epochs;
  int best_epoch = 0;  // epoch whose parameters were kept
};

/// Adam on the mean CTC loss. Utterances whose transcript cannot be aligned
/// to the model's frame count are skipped and counted. Deterministic in
/// `cfg.seed` on a given platform.
AsrTrainReport train_asr(AsrModel& model, const Dataset& train, const Dataset& heldout,
                         const AsrTrainConfig& cfg,
                         const std::function<void(const EpochLog&)>& on_epoch = {});

/// Greedy transcriptions of every utterance, in batches.
std::vector<std::string> transcribe_dataset(AsrBackend& asr, const Dataset& data, int batch_size = 16);

/// Pooled held-out CER of `asr` on `data`.
double dataset_cer(AsrBackend& asr, const Dataset& data, int batch_size = 16);

/// Mean per-utterance CTC loss of a white-box backend.
double dataset_loss(AsrBackend& asr, const Dataset& data, int batch_size = 16);

}  // namespace camo
