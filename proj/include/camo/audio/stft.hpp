// camo/audio/stft.hpp

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

#include <ATen/core/Tensor.h>
#include <nlohmann/json_fwd.hpp>

#include "camo/audio/waveform.hpp"

namespace camo {

enum class WindowKind { kHamming, kHann };

/// How the frame count of an STFT is decided.
///   natural:          1 + (N - window) / hop frames, no padding.
///   pad_to_target(n): natural framing, then zero frames appended (or
///                     trailing frames dropped) to exactly n.
struct FramePadding {
  enum class Kind { kNatural, kPadToTarget } kind = Kind::kPadToTarget;
  std::int64_t target_frames = 204;

  static FramePadding natural() { return {Kind::kNatural, 0}; }
  static FramePadding pad_to_target(std::int64_t n) { return {Kind::kPadToTarget, n}; }
};

struct StftConfig {
  int window_length = 320;
  int hop_length = 160;
  int nfft = 320;
  WindowKind window = WindowKind::kHamming;
  FramePadding padding;

  int freq_bins() const { return nfft / 2 + 1; }
  void validate() const;

  static StftConfig natural_framing() {
    StftConfig c;
    c.padding = FramePadding::natural();
    return c;
  }
};

void to_json(nlohmann::json& j, const StftConfig& c);
void from_json(const nlohmann::json& j, StftConfig& c);

/// Two-channel (real, imaginary) time-frequency representation,
/// shape (2, freq_bins, frames).
struct SpectrogramContext {
  at::Tensor values;

  std::int64_t channels() const { return values.size(0); }
  std::int64_t freq_bins() const { return values.size(1); }
  std::int64_t frames() const { return values.size(2); }
};

/// Analysis window of `cfg.window_length` samples, periodic form.
at::Tensor analysis_window(const StftConfig& cfg);

/// Frames produced by natural framing of n samples (at least one frame;
/// signals shorter than the window are zero-padded to one frame).
std::int64_t natural_frame_count(std::int64_t num_samples, const StftConfig& cfg);

/// Frames after applying the padding policy.
std::int64_t frame_count(std::int64_t num_samples, const StftConfig& cfg);

SpectrogramContext stft(const Waveform& w, const StftConfig& cfg);

/// Batched, differentiable STFT: [B, N] -> [B, 2, freq_bins, frames].
at::Tensor stft_batch(const at::Tensor& samples, const StftConfig& cfg);

}  // namespace camo
