// camo/audio/waveform.hpp

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
#include <span>
#include <vector>

#include <ATen/core/Tensor.h>

namespace camo {

inline constexpr int kSampleRate = 16000;

/// Mono audio. Samples are nominally in [-1, 1]; 16-bit PCM is divided by
/// 32768 on ingest.
struct Waveform {
  std::vector<float> samples;
  int sample_rate = kSampleRate;

  Waveform() = default;
  explicit Waveform(std::vector<float> s, int rate = kSampleRate)
      : samples(std::move(s)), sample_rate(rate) {}
  static Waveform zeros(std::int64_t n, int rate = kSampleRate) {
    return Waveform(std::vector<float>(static_cast<std::size_t>(n), 0.0f), rate);
  }

  std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }
  bool empty() const { return samples.empty(); }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  std::span<const float> view() const { return samples; }

  /// max_i |samples[i]|; 0 for an empty waveform.
  float peak() const;
  bool all_finite() const;
};

/// Throws DomainError on an empty waveform, non-finite samples or a
/// non-positive sample rate.
void require_valid(const Waveform& w);

/// Rounds seconds to the nearest sample index.
std::int64_t seconds_to_samples(double seconds, int sample_rate);

/// Relative amplitude m and the absolute l-inf bound derived from it.
struct AttackBudget {
  double multiplier = 0.0;
  float epsilon = 0.0f;
};

/// eps = m * max|w|.
AttackBudget compute_epsilon(const Waveform& w, double multiplier);
AttackBudget compute_epsilon(std::span<const float> samples, double multiplier);

/// Adds `attack` into `clean` starting at `start_offset` seconds. The result
/// keeps the clean length; attack samples past the end are discarded.
Waveform mix(const Waveform& clean, const Waveform& attack, double start_offset);

/// Sample-offset form of mix(); `offset` may not be negative.
void mix_into(std::span<float> clean, std::span<const float> attack, std::int64_t offset);

/// Projects every sample onto [-eps, eps].
Waveform clip_to_budget(Waveform p, const AttackBudget& b);

/// [N] float tensor sharing no storage with `w`.
at::Tensor to_tensor(const Waveform& w);
at::Tensor to_tensor(std::span<const float> samples);
/// Copies a 1-D float tensor back into a waveform.
Waveform from_tensor(const at::Tensor& t, int sample_rate = kSampleRate);

/// Zero-pads a set of waveforms to a [B, max_len] tensor.
at::Tensor stack_padded(const std::vector<const Waveform*>& batch,
                        std::vector<std::int64_t>* lengths = nullptr);

}  // namespace camo
