// camo/defense/denoiser.hpp

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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <ATen/core/Tensor.h>
#include <nlohmann/json.hpp>

#include "camo/asr/backend.hpp"
#include "camo/audio/waveform.hpp"

namespace camo {

/// Length-preserving waveform cleaner with frozen parameters.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual std::string name() const = 0;
  /// [B, N] -> [B, N]; differentiable w.r.t. the input. Samples past each
  /// length are returned as zero.
  virtual at::Tensor apply(const at::Tensor& samples, std::span<const std::int64_t> lengths) const = 0;
  Waveform denoise(const Waveform& w) const;
};

/// Spectral gating. The noise floor of each frequency bin is the mean
/// magnitude over the quietest `quiet_fraction` of frames; each bin is
/// scaled by max(1 - over_subtraction * floor / |X|, min_gain), keeping
/// the phase, and resynthesized by overlap-add (Hann 320/160).
struct SpectralGateOptions {
  double over_subtraction = 2.0;
  double min_gain = 0.1;
  double quiet_fraction = 0.1;

  nlohmann::json to_json() const;
  static SpectralGateOptions from_json(const nlohmann::json& j);
};

class SpectralGateDenoiser : public Denoiser {
 public:
  explicit SpectralGateDenoiser(SpectralGateOptions opts = {});
  std::string name() const override { return "spectral-gate"; }
  at::Tensor apply(const at::Tensor& samples, std::span<const std::int64_t> lengths) const override;
  const SpectralGateOptions& options() const { return opts_; }

 private:
  SpectralGateOptions opts_;
};

/// ASR behind a denoiser: f(h(x)). Gradients flow through both when the
/// inner backend is white-box.
class DenoisedAsr : public AsrBackend {
 public:
  DenoisedAsr(std::shared_ptr<AsrBackend> inner, std::shared_ptr<const Denoiser> denoiser);

  std::string name() const override;
  bool differentiable() const override { return inner_->differentiable(); }
  std::vector<std::string> transcribe(const at::Tensor& samples, std::span<const std::int64_t> lengths) override;
  at::Tensor loss(const at::Tensor& samples, std::span<const std::int64_t> lengths,
                  const std::vector<std::vector<int>>& targets) override;
  using AsrBackend::transcribe;

 private:
  std::shared_ptr<AsrBackend> inner_;
  std::shared_ptr<const Denoiser> denoiser_;
};

}  // namespace camo
