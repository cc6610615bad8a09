// src/predictor/predictor.cpp

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

#include "camo/predictor/predictor.hpp"

#include <algorithm>

#include <torch/torch.h>

#include "camo/core/error.hpp"
#include "camo/core/rng.hpp"
#include "camo/io/archive.hpp"

namespace camo {

namespace {
constexpr const char* kKind = "predictor";
}

PredictorArchitecture PredictorArchitecture::scaled(int divisor) {
  if (divisor < 1) throw DomainError("predictor: scale divisor must be >= 1");
  PredictorArchitecture a;
  for (auto& c : a.down_channels) c = std::max(1, c / divisor);
  for (std::size_t i = 0; i + 1 < a.up_channels.size(); ++i) a.up_channels[i] = std::max(1, a.up_channels[i] / divisor);
  return a;
}

void PredictorArchitecture::validate() const {
  if (down_channels.empty() || up_channels.empty() || output_length <= 0 || up_kernel < 2 || up_kernel % 2 != 0)
    throw DomainError("predictor: invalid architecture");
  for (int c : down_channels)
    if (c < 1) throw DomainError("predictor: channel counts must be positive");
  for (int c : up_channels)
    if (c < 1) throw DomainError("predictor: channel counts must be positive");
  std::int64_t h = input_bins, w = input_frames;
  for (std::size_t i = 0; i < down_channels.size(); ++i) {
    h = (h - 1) / 2 + 1;
    w = (w - 1) / 2 + 1;
  }
  if (h != 1 || w != 1)
    throw DomainError("predictor: down-sampling stack must reduce the " + std::to_string(input_bins) + "x" +
                      std::to_string(input_frames) + " input to 1x1");
}

nlohmann::json PredictorArchitecture::to_json() const {
  return {{"kind", "conv-down8-up4-linear-tanh"},
          {"down_channels", down_channels},
          {"up_channels", up_channels},
          {"up_kernel", up_kernel},
          {"input_bins", input_bins},
          {"input_frames", input_frames},
          {"output_length", output_length},
          {"input_scale", input_scale}};
}

PredictorArchitecture PredictorArchitecture::from_json(const nlohmann::json& j) {
  PredictorArchitecture a;
  a.down_channels = j.value("down_channels", a.down_channels);
  a.up_channels = j.value("up_channels", a.up_channels);
  a.up_kernel = j.value("up_kernel", a.up_kernel);
  a.input_bins = j.value("input_bins", a.input_bins);
  a.input_frames = j.value("input_frames", a.input_frames);
  a.output_length = j.value("output_length", a.output_length);
  a.input_scale = j.value("input_scale", a.input_scale);
  a.validate();
  return a;
}

PredictorModelImpl::PredictorModelImpl(const PredictorArchitecture& arch) : arch_(arch) {
  namespace nn = torch::nn;
  arch_.validate();
  down_ = nn::Sequential();
  int cin = 2;
  for (std::size_t i = 0; i < arch_.down_channels.size(); ++i) {
    const int cout = arch_.down_channels[i];
    down_->push_back(nn::ReflectionPad2d(nn::ReflectionPad2dOptions(1)));
    down_->push_back(nn::Conv2d(nn::Conv2dOptions(cin, cout, 3).stride(2)));
    down_->push_back(nn::BatchNorm2d(cout));
    if (i + 1 < arch_.down_channels.size())
      down_->push_back(nn::PReLU());
    else
      down_->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)));
    cin = cout;
  }
  up_ = nn::Sequential();
  cin = 1;
  const int pad = arch_.up_kernel / 2 - 1;  // exact doubling
  for (int cout : arch_.up_channels) {
    up_->push_back(nn::ConvTranspose1d(nn::ConvTranspose1dOptions(cin, cout, arch_.up_kernel).stride(2).padding(pad)));
    up_->push_back(nn::LeakyReLU(nn::LeakyReLUOptions().negative_slope(0.2)));
    cin = cout;
  }
  out_ = nn::Linear(arch_.upsampled_length() * arch_.up_channels.back(), arch_.output_length);
  register_module("down", down_);
  register_module("up", up_);
  register_module("out", out_);
}

torch::Tensor PredictorModelImpl::raw(const torch::Tensor& ctx) {
  if (ctx.dim() != 4 || ctx.size(1) != 2 || ctx.size(2) != arch_.input_bins || ctx.size(3) != arch_.input_frames)
    throw DomainError("predictor: expected context of shape [B, 2, " + std::to_string(arch_.input_bins) + ", " +
                      std::to_string(arch_.input_frames) + "]");
  auto h = down_->forward(ctx * arch_.input_scale);
  h = h.reshape({ctx.size(0), 1, -1});
  h = up_->forward(h).flatten(1);
  return torch::tanh(out_->forward(h));
}

torch::Tensor PredictorModelImpl::forward(const torch::Tensor& ctx, const torch::Tensor& eps) {
  return raw(ctx) * eps.to(torch::kFloat).reshape({-1, 1});
}

int PredictorModelImpl::weight_layer_count() const {
  return static_cast<int>(arch_.down_channels.size() + arch_.up_channels.size() + 1);
}

PredictorModel make_predictor(const PredictorArchitecture& arch, std::uint64_t seed) {
  torch::manual_seed(derive_seed(seed, "predictor-init"));
  return PredictorModel(arch);
}

StftConfig context_stft(const PredictorArchitecture& arch) {
  StftConfig c;
  c.padding = FramePadding::pad_to_target(arch.input_frames);
  return c;
}

SpectrogramContext context_window(const Waveform& stream, double t, const StftConfig& cfg) {
  constexpr double kContext = 2.0;
  if (t < kContext) throw InsufficientContextError("context_window: t must be at least 2 s");
  const auto end = seconds_to_samples(t, stream.sample_rate);
  const auto begin = end - seconds_to_samples(kContext, stream.sample_rate);
  if (end > stream.size()) throw DomainError("context_window: t is past the end of the stream");
  Waveform w(std::vector<float>(stream.samples.begin() + begin, stream.samples.begin() + end), stream.sample_rate);
  return stft(w, cfg);
}

Perturbation predict_attack(PredictorModel& model, const SpectrogramContext& ctx, const AttackBudget& budget) {
  model->eval();
  auto out = model->forward(ctx.values.unsqueeze(0), torch::tensor({budget.epsilon}))[0];
  Perturbation p;
  p.samples = from_tensor(out.detach());
  p.budget = budget;
  p.provenance = Provenance::kPredictive;
  return p;
}

PredictiveGenerator::PredictiveGenerator(PredictorModel model)
    : model_(std::move(model)), stft_(context_stft(model_->architecture())) {}

Perturbation PredictiveGenerator::generate(std::span<const float> observed, const ChunkRequest& req) {
  if (req.length != model_->architecture().output_length)
    throw DomainError("predictive generator: chunk length " + std::to_string(req.length) +
                      " differs from the network's output length " +
                      std::to_string(model_->architecture().output_length));
  const auto ctx = req.clock->context_samples();
  const auto n = static_cast<std::int64_t>(observed.size());
  if (n < ctx) throw InsufficientContextError("predictive generator: less than one context window observed");
  torch::NoGradGuard no_grad;
  auto window = to_tensor(observed.subspan(static_cast<std::size_t>(n - ctx))).unsqueeze(0);
  auto spec = stft_batch(window, stft_);
  model_->eval();
  auto out = model_->forward(spec, torch::tensor({req.budget.epsilon}))[0];
  return {from_tensor(out), req.budget, Provenance::kPredictive};
}

void save_predictor(const std::filesystem::path& path, PredictorModel& model) {
  save_archive(path, kKind, model->architecture().to_json(), model->metadata, *model);
}

PredictorModel load_predictor(const std::filesystem::path& path) {
  const auto h = read_archive_header(path);
  if (h.kind != kKind) throw FormatError("'" + path.string() + "' holds a '" + h.kind + "', not a predictor");
  PredictorModel m(PredictorArchitecture::from_json(h.architecture));
  load_archive_into(path, kKind, *m);
  m->metadata = h.metadata;
  m->eval();
  return m;
}

}  // namespace camo
