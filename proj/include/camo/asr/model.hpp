// camo/asr/model.hpp

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
#include <string>

#include <nlohmann/json.hpp>
#include <torch/nn/module.h>
#include <torch/nn/modules/batchnorm.h>
#include <torch/nn/modules/conv.h>
#include <torch/nn/modules/linear.h>
#include <torch/nn/modules/rnn.h>
#include <torch/nn/pimpl.h>

#include "camo/audio/stft.hpp"

namespace camo {

/// Reference CTC acoustic model:
///   log|STFT| -> 2 x (conv2d, batchnorm, clipped relu) -> GRU stack -> linear
/// The first convolution halves the frame rate (100 -> 50 frames/s).
struct AsrArchitecture {
  int conv1_channels = 16;
  int conv2_channels = 8;
  int hidden = 256;
  int rnn_layers = 2;
  double log_floor = 1e-2;

  nlohmann::json to_json() const;
  static AsrArchitecture from_json(const nlohmann::json& j);
};

struct AsrTrainingMetadata {
  int epochs = 0;
  std::string corpus_id;
  std::string note;
};

class AsrModelImpl : public torch::nn::Module {
 public:
  explicit AsrModelImpl(const AsrArchitecture& arch = {});

  /// [B, N] samples -> [B, T, 29] per-frame log-probabilities.
  torch::Tensor forward(const torch::Tensor& samples);

  /// Output frames for an input of `num_samples` samples.
  std::int64_t output_frames(std::int64_t num_samples) const;

  const AsrArchitecture& architecture() const { return arch_; }
  static StftConfig feature_stft() { return StftConfig::natural_framing(); }

  AsrTrainingMetadata metadata;

 private:
  AsrArchitecture arch_;
  torch::nn::Conv2d conv1_{nullptr}, conv2_{nullptr};
  torch::nn::BatchNorm2d bn1_{nullptr}, bn2_{nullptr};
  torch::nn::GRU rnn_{nullptr};
  torch::nn::Linear fc_{nullptr};
};
TORCH_MODULE(AsrModel);

/// Archive round trip (kind "asr"); metadata and architecture are kept.
void save_asr(const std::filesystem::path& path, AsrModel& model);
AsrModel load_asr(const std::filesystem::path& path);

}  // namespace camo
