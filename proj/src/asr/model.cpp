// src/asr/model.cpp

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

#include "camo/asr/model.hpp"

#include <torch/torch.h>

#include "camo/asr/alphabet.hpp"

namespace camo {

namespace {

constexpr std::int64_t kFreqAfterConv = 41;  // 161 -> 81 -> 41

std::int64_t conv_out(std::int64_t n, int kernel, int stride, int pad) {
  return (n + 2 * pad - kernel) / stride + 1;
}

}  // namespace

nlohmann::json AsrArchitecture::to_json() const {
  return {{"kind", "conv2-gru-ctc"},
          {"conv1_channels", conv1_channels},
          {"conv2_channels", conv2_channels},
          {"hidden", hidden},
          {"rnn_layers", rnn_layers},
          {"log_floor", log_floor}};
}

AsrArchitecture AsrArchitecture::from_json(const nlohmann::json& j) {
  AsrArchitecture a;
  a.conv1_channels = j.value("conv1_channels", a.conv1_channels);
  a.conv2_channels = j.value("conv2_channels", a.conv2_channels);
  a.hidden = j.value("hidden", a.hidden);
  a.rnn_layers = j.value("rnn_layers", a.rnn_layers);
  a.log_floor = j.value("log_floor", a.log_floor);
  return a;
}

AsrModelImpl::AsrModelImpl(const AsrArchitecture& arch) : arch_(arch) {
  namespace nn = torch::nn;
  conv1_ = register_module(
      "conv1", nn::Conv2d(nn::Conv2dOptions(1, arch.conv1_channels, {11, 5}).stride({2, 2}).padding({5, 2})));
  bn1_ = register_module("bn1", nn::BatchNorm2d(arch.conv1_channels));
  conv2_ = register_module(
      "conv2",
      nn::Conv2d(nn::Conv2dOptions(arch.conv1_channels, arch.conv2_channels, {7, 3}).stride({2, 1}).padding({3, 1})));
  bn2_ = register_module("bn2", nn::BatchNorm2d(arch.conv2_channels));
  rnn_ = register_module(
      "rnn", nn::GRU(nn::GRUOptions(arch.conv2_channels * kFreqAfterConv, arch.hidden)
                         .num_layers(arch.rnn_layers)
                         .batch_first(true)));
  fc_ = register_module("fc", nn::Linear(arch.hidden, Alphabet::kSize));
}

std::int64_t AsrModelImpl::output_frames(std::int64_t num_samples) const {
  const auto frames = natural_frame_count(num_samples, feature_stft());
  return conv_out(conv_out(frames, 5, 2, 2), 3, 1, 1);
}

torch::Tensor AsrModelImpl::forward(const torch::Tensor& samples) {
  auto spec = stft_batch(samples, feature_stft());  // [B, 2, F, T]
  auto re = spec.select(1, 0);
  auto im = spec.select(1, 1);
  auto mag = torch::sqrt(re * re + im * im + 1e-12);
  auto x = torch::log(mag + arch_.log_floor).unsqueeze(1);  // [B, 1, F, T]

  x = torch::hardtanh(bn1_->forward(conv1_->forward(x)), 0.0, 20.0);
  x = torch::hardtanh(bn2_->forward(conv2_->forward(x)), 0.0, 20.0);
  const auto B = x.size(0);
  const auto T = x.size(3);
  x = x.permute({0, 3, 1, 2}).reshape({B, T, -1});  // [B, T, C*F]
  x = std::get<0>(rnn_->forward(x));
  return torch::log_softmax(fc_->forward(x), -1);
}

}  // namespace camo
