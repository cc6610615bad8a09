// src/defense/denoiser.cpp

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

#include "camo/defense/denoiser.hpp"

#include <algorithm>
#include <cmath>

#include <torch/torch.h>

#include "camo/core/error.hpp"

namespace camo {

namespace {
constexpr std::int64_t kWin = 320;
constexpr std::int64_t kHop = 160;
}  // namespace

Waveform Denoiser::denoise(const Waveform& w) const {
  if (w.empty()) return w;
  torch::NoGradGuard no_grad;
  const std::int64_t n = w.size();
  auto y = apply(to_tensor(w).unsqueeze(0), std::span<const std::int64_t>(&n, 1));
  return from_tensor(y[0], w.sample_rate);
}

nlohmann::json SpectralGateOptions::to_json() const {
  return {{"over_subtraction", over_subtraction}, {"min_gain", min_gain}, {"quiet_fraction", quiet_fraction}};
}

SpectralGateOptions SpectralGateOptions::from_json(const nlohmann::json& j) {
  SpectralGateOptions o;
  o.over_subtraction = j.value("over_subtraction", o.over_subtraction);
  o.min_gain = j.value("min_gain", o.min_gain);
  o.quiet_fraction = j.value("quiet_fraction", o.quiet_fraction);
  return o;
}

SpectralGateDenoiser::SpectralGateDenoiser(SpectralGateOptions opts) : opts_(opts) {
  if (!(opts_.over_subtraction >= 0) || !(opts_.min_gain >= 0 && opts_.min_gain <= 1) ||
      !(opts_.quiet_fraction > 0 && opts_.quiet_fraction <= 1))
    throw DomainError("spectral gate: invalid options");
}

namespace {

// One utterance, no padding: [n] -> [n].
at::Tensor gate_one(const at::Tensor& x, const SpectralGateOptions& opts) {
  const auto n = x.size(0);
  if (n < kWin) return x;  // too short to gate
  auto window = torch::hann_window(kWin, torch::TensorOptions().dtype(x.scalar_type()));
  auto X = torch::stft(x, kWin, kHop, kWin, window, /*center=*/true, "reflect", false, true, true);
  auto mag = torch::abs(X);  // [F, T]
  at::Tensor floor;
  {
    torch::NoGradGuard no_grad;
    const auto T = mag.size(1);
    const auto k = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(opts.quiet_fraction * T)));
    auto idx = std::get<1>(torch::topk(mag.pow(2).sum(0), k, -1, /*largest=*/false, /*sorted=*/true));
    floor = mag.index_select(1, idx).mean(1, true);  // [F, 1]
  }
  auto gain = torch::clamp_min(1.0 - opts.over_subtraction * floor / (mag + 1e-8), opts.min_gain);
  return torch::istft(X * gain, kWin, kHop, kWin, window, true, false, true, n);
}

}  // namespace

at::Tensor SpectralGateDenoiser::apply(const at::Tensor& samples, std::span<const std::int64_t> lengths) const {
  if (samples.dim() != 2 || static_cast<std::size_t>(samples.size(0)) != lengths.size())
    throw DomainError("denoiser: expected [B, N] samples with one length per item");
  const auto B = samples.size(0), N = samples.size(1);
  // Each item on its own span so padding never changes the result.
  std::vector<at::Tensor> rows;
  rows.reserve(static_cast<std::size_t>(B));
  for (std::int64_t b = 0; b < B; ++b) {
    const auto n = std::clamp<std::int64_t>(lengths[static_cast<std::size_t>(b)], 0, N);
    auto y = gate_one(samples[b].slice(0, 0, n), opts_);
    rows.push_back(torch::constant_pad_nd(y, {0, N - n}));
  }
  return torch::stack(rows);
}

DenoisedAsr::DenoisedAsr(std::shared_ptr<AsrBackend> inner, std::shared_ptr<const Denoiser> denoiser)
    : inner_(std::move(inner)), denoiser_(std::move(denoiser)) {
  if (!inner_ || !denoiser_) throw DomainError("DenoisedAsr needs a backend and a denoiser");
}

std::string DenoisedAsr::name() const { return denoiser_->name() + "+" + inner_->name(); }

std::vector<std::string> DenoisedAsr::transcribe(const at::Tensor& samples, std::span<const std::int64_t> lengths) {
  torch::NoGradGuard no_grad;
  return inner_->transcribe(denoiser_->apply(samples, lengths), lengths);
}

at::Tensor DenoisedAsr::loss(const at::Tensor& samples, std::span<const std::int64_t> lengths,
                             const std::vector<std::vector<int>>& targets) {
  return inner_->loss(denoiser_->apply(samples, lengths), lengths, targets);
}

}  // namespace camo
