// camo/predictor/predictor.hpp

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

// Predictive attack network: 2 s of (real, imag) STFT in, r seconds of
// waveform out.
//
//   8 x [reflect-pad 1, conv 3x3 stride 2, batchnorm, PReLU]   161x204 -> 1x1
//       (the last block uses leaky ReLU 0.2)
//   flatten to a 1-channel sequence of length C_last
//   4 x [transposed conv k=8 s=2 p=3, leaky ReLU]              length x16
//   linear -> output_length, tanh, times eps

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/nn/module.h>
#include <torch/nn/modules/container/sequential.h>
#include <torch/nn/modules/linear.h>
#include <torch/nn/pimpl.h>

#include "camo/attack/perturbation.hpp"
#include "camo/audio/stft.hpp"
#include "camo/stream/plan.hpp"

namespace camo {

struct PredictorArchitecture {
  std::vector<int> down_channels{64, 128, 128, 128, 128, 128, 128, 256};
  std::vector<int> up_channels{64, 32, 16, 1};
  int up_kernel = 8;
  int input_bins = 161;
  int input_frames = 204;
  int output_length = 8000;
  /// Contexts are multiplied by this before the first convolution.
  double input_scale = 1.0;

  /// Channel widths divided by `divisor` (at least 1 channel each); the
  /// final up-block always has one channel.
  static PredictorArchitecture scaled(int divisor);

  void validate() const;
  std::int64_t flat_length() const { return down_channels.back(); }
  std::int64_t upsampled_length() const { return flat_length() << up_channels.size(); }

  nlohmann::json to_json() const;
  static PredictorArchitecture from_json(const nlohmann::json& j);
};

class PredictorModelImpl : public torch::nn::Module {
 public:
  explicit PredictorModelImpl(const PredictorArchitecture& arch = {});

  /// [B, 2, bins, frames] -> [B, output_length] in (-1, 1).
  torch::Tensor raw(const torch::Tensor& ctx);
  /// raw(ctx) scaled per item by `eps` ([B]).
  torch::Tensor forward(const torch::Tensor& ctx, const torch::Tensor& eps);

  const PredictorArchitecture& architecture() const { return arch_; }
  /// Layers carrying weights: down convs, up convs and the linear layer.
  int weight_layer_count() const;

  nlohmann::json metadata = nlohmann::json::object();

 private:
  PredictorArchitecture arch_;
  torch::nn::Sequential down_{nullptr}, up_{nullptr};
  torch::nn::Linear out_{nullptr};
};
TORCH_MODULE(PredictorModel);

/// Seeds the torch generator from `seed` and builds the network.
PredictorModel make_predictor(const PredictorArchitecture& arch, std::uint64_t seed);

/// STFT settings for predictor contexts (padded to the architecture's frames).
StftConfig context_stft(const PredictorArchitecture& arch);

/// STFT of stream[t - 2 s, t). Throws InsufficientContextError for t < 2 s
/// and DomainError when t is past the end of the stream.
SpectrogramContext context_window(const Waveform& stream, double t, const StftConfig& cfg);

/// Single-context inference (batch-norm in inference mode). Output is
/// differentiable w.r.t. the parameters and ctx.values.
Perturbation predict_attack(PredictorModel& model, const SpectrogramContext& ctx, const AttackBudget& budget);

/// Scheduler adapter: predicts each chunk from the last 2 s of the prefix.
class PredictiveGenerator : public ChunkGenerator {
 public:
  explicit PredictiveGenerator(PredictorModel model);
  Provenance provenance() const override { return Provenance::kPredictive; }
  Perturbation generate(std::span<const float> observed, const ChunkRequest& req) override;

 private:
  PredictorModel model_;
  StftConfig stft_;
};

void save_predictor(const std::filesystem::path& path, PredictorModel& model);
PredictorModel load_predictor(const std::filesystem::path& path);

}  // namespace camo
