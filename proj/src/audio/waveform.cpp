// src/audio/waveform.cpp

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

#include "camo/audio/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <torch/torch.h>

#include "camo/core/error.hpp"

namespace camo {

float Waveform::peak() const {
  float m = 0.0f;
  for (float s : samples) m = std::max(m, std::fabs(s));
  return m;
}

bool Waveform::all_finite() const {
  return std::all_of(samples.begin(), samples.end(), [](float s) { return std::isfinite(s); });
}

void require_valid(const Waveform& w) {
  if (w.sample_rate <= 0) throw DomainError("waveform: sample rate must be positive");
  if (w.empty()) throw DomainError("waveform: empty");
  if (!w.all_finite()) throw DomainError("waveform: non-finite samples");
}

std::int64_t seconds_to_samples(double seconds, int sample_rate) {
  return std::llround(seconds * sample_rate);
}

AttackBudget compute_epsilon(std::span<const float> samples, double multiplier) {
  if (!(multiplier >= 0.0)) throw DomainError("compute_epsilon: multiplier must be >= 0");
  float peak = 0.0f;
  for (float s : samples) peak = std::max(peak, std::fabs(s));
  return {multiplier, static_cast<float>(multiplier * static_cast<double>(peak))};
}

AttackBudget compute_epsilon(const Waveform& w, double multiplier) {
  return compute_epsilon(w.view(), multiplier);
}

void mix_into(std::span<float> clean, std::span<const float> attack, std::int64_t offset) {
  if (offset < 0) throw DomainError("mix: negative offset");
  const auto n = static_cast<std::int64_t>(clean.size());
  const auto end = std::min<std::int64_t>(n, offset + static_cast<std::int64_t>(attack.size()));
  for (std::int64_t i = offset; i < end; ++i) clean[i] += attack[i - offset];
}

Waveform mix(const Waveform& clean, const Waveform& attack, double start_offset) {
  if (clean.sample_rate != attack.sample_rate)
    throw DomainError("mix: sample-rate mismatch (" + std::to_string(clean.sample_rate) + " vs " +
                      std::to_string(attack.sample_rate) + ")");
  if (!(start_offset >= 0.0)) throw DomainError("mix: start offset must be >= 0");
  Waveform out = clean;
  mix_into(out.samples, attack.samples, seconds_to_samples(start_offset, clean.sample_rate));
  return out;
}

Waveform clip_to_budget(Waveform p, const AttackBudget& b) {
  const float e = b.epsilon;
  for (float& s : p.samples) s = std::clamp(s, -e, e);
  return p;
}

at::Tensor to_tensor(std::span<const float> samples) {
  return torch::from_blob(const_cast<float*>(samples.data()),
                          {static_cast<std::int64_t>(samples.size())}, torch::kFloat32)
      .clone();
}

at::Tensor to_tensor(const Waveform& w) { return to_tensor(w.view()); }

Waveform from_tensor(const at::Tensor& t, int sample_rate) {
  auto c = t.detach().to(torch::kCPU, torch::kFloat32).contiguous().view({-1});
  const float* p = c.data_ptr<float>();
  return Waveform(std::vector<float>(p, p + c.numel()), sample_rate);
}

at::Tensor stack_padded(const std::vector<const Waveform*>& batch,
                        std::vector<std::int64_t>* lengths) {
  std::int64_t max_len = 0;
  for (const auto* w : batch) max_len = std::max(max_len, w->size());
  auto out = torch::zeros({static_cast<std::int64_t>(batch.size()), max_len});
  auto acc = out.accessor<float, 2>();
  if (lengths) lengths->clear();
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto& s = batch[b]->samples;
    for (std::size_t i = 0; i < s.size(); ++i) acc[b][i] = s[i];
    if (lengths) lengths->push_back(batch[b]->size());
  }
  return out;
}

}  // namespace camo
