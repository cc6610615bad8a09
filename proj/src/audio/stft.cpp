// src/audio/stft.cpp

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

#include "camo/audio/stft.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "camo/core/error.hpp"

namespace camo {

void StftConfig::validate() const {
  if (window_length <= 0 || hop_length <= 0 || nfft <= 0)
    throw DomainError("stft: window, hop and nfft must be positive");
  if (window_length > nfft) throw DomainError("stft: window_length > nfft");
  if (hop_length > window_length) throw DomainError("stft: hop_length > window_length");
  if (padding.kind == FramePadding::Kind::kPadToTarget && padding.target_frames <= 0)
    throw DomainError("stft: pad_to_target needs a positive frame count");
}

void to_json(nlohmann::json& j, const StftConfig& c) {
  j = nlohmann::json{{"window_length", c.window_length},
                     {"hop_length", c.hop_length},
                     {"nfft", c.nfft},
                     {"window", c.window == WindowKind::kHamming ? "hamming" : "hann"}};
  if (c.padding.kind == FramePadding::Kind::kNatural)
    j["padding"] = "natural";
  else
    j["padding"] = {{"pad_to_target", c.padding.target_frames}};
}

void from_json(const nlohmann::json& j, StftConfig& c) {
  c.window_length = j.value("window_length", 320);
  c.hop_length = j.value("hop_length", 160);
  c.nfft = j.value("nfft", 320);
  const auto w = j.value("window", std::string("hamming"));
  if (w == "hamming")
    c.window = WindowKind::kHamming;
  else if (w == "hann")
    c.window = WindowKind::kHann;
  else
    throw FormatError("stft config: unknown window '" + w + "'");
  if (!j.contains("padding")) {
    c.padding = FramePadding::pad_to_target(204);
  } else if (j["padding"].is_string()) {
    if (j["padding"] != "natural") throw FormatError("stft config: unknown padding policy");
    c.padding = FramePadding::natural();
  } else {
    c.padding = FramePadding::pad_to_target(j["padding"].at("pad_to_target").get<std::int64_t>());
  }
  c.validate();
}

at::Tensor analysis_window(const StftConfig& cfg) {
  const double n = cfg.window_length;
  auto w = torch::empty({cfg.window_length}, torch::kFloat64);
  auto a = w.accessor<double, 1>();
  for (int i = 0; i < cfg.window_length; ++i) {
    const double c = std::cos(2.0 * std::numbers::pi * i / n);
    a[i] = cfg.window == WindowKind::kHamming ? 0.54 - 0.46 * c : 0.5 - 0.5 * c;
  }
  return w.to(torch::kFloat32);
}

std::int64_t natural_frame_count(std::int64_t num_samples, const StftConfig& cfg) {
  if (num_samples <= cfg.nfft) return 1;
  return 1 + (num_samples - cfg.nfft) / cfg.hop_length;
}

std::int64_t frame_count(std::int64_t num_samples, const StftConfig& cfg) {
  return cfg.padding.kind == FramePadding::Kind::kNatural ? natural_frame_count(num_samples, cfg)
                                                          : cfg.padding.target_frames;
}

at::Tensor stft_batch(const at::Tensor& samples, const StftConfig& cfg) {
  cfg.validate();
  if (samples.dim() != 2) throw DomainError("stft_batch: expected [B, N] samples");
  if (samples.size(1) == 0) throw DomainError("stft: empty waveform");
  auto x = samples;
  if (x.size(1) < cfg.nfft) x = torch::constant_pad_nd(x, {0, cfg.nfft - x.size(1)});
  auto window = analysis_window(cfg).to(x.device(), x.scalar_type());
  auto spec = torch::stft(x, cfg.nfft, cfg.hop_length, cfg.window_length, window,
                          /*normalized=*/false, /*onesided=*/true, /*return_complex=*/true);
  // [B, F, T] complex -> [B, 2, F, T]
  auto out = torch::view_as_real(spec).permute({0, 3, 1, 2});
  if (cfg.padding.kind == FramePadding::Kind::kPadToTarget) {
    const auto have = out.size(3);
    const auto want = cfg.padding.target_frames;
    if (have < want)
      out = torch::constant_pad_nd(out, {0, want - have});
    else if (have > want)
      out = out.narrow(3, 0, want);
  }
  return out.contiguous();
}

SpectrogramContext stft(const Waveform& w, const StftConfig& cfg) {
  require_valid(w);
  if (w.sample_rate != kSampleRate)
    throw DomainError("stft: expected " + std::to_string(kSampleRate) + " Hz input");
  auto x = to_tensor(w).unsqueeze(0);
  return {stft_batch(x, cfg).squeeze(0)};
}

}  // namespace camo
