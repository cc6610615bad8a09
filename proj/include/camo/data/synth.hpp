// camo/data/synth.hpp

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

// Synthetic spoken-token corpus.
//
// Every letter is rendered as a short acoustic token: voiced letters as a
// harmonic series on the speaker's pitch shaped by two letter-specific
// formants, unvoiced letters as band-limited noise (plosives get an onset
// burst). Words are letter sequences, utterances are word sequences with
// pauses, over a per-utterance background noise floor. Speakers differ in
// pitch, formant scale and speaking rate.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "camo/data/dataset.hpp"

namespace camo {

struct SpeakerProfile {
  std::string id;
  double f0 = 120.0;          // Hz
  double formant_scale = 1.0;
  double rate = 1.0;          // >1 is slower (durations are multiplied)
};

struct SynthConfig {
  std::uint64_t seed = 1;
  int num_utterances = 500;
  int num_speakers = 20;
  double min_duration = 4.0;  // seconds
  double max_duration = 6.0;
  double noise_min = 0.002;   // background noise std, relative to the peak
  double noise_max = 0.02;
  double peak_min = 0.5;
  double peak_max = 0.95;
  double formant_spread = 0.05;  // speaker formant scale in 1 +- spread
  double rate_spread = 0.15;     // speaker rate in 1 +- spread
  std::vector<std::string> vocabulary;  // empty = default_vocabulary()
};

std::vector<std::string> default_vocabulary();

std::vector<SpeakerProfile> make_speakers(int count, std::uint64_t seed, double formant_spread = 0.05,
                                          double rate_spread = 0.15);

/// Renders `text` (normalized, letters and spaces) for one speaker without
/// background noise or level normalization.
Waveform render_text(const std::string& text, const SpeakerProfile& speaker, std::mt19937_64& rng);

/// Deterministic in `cfg.seed`. Utterance ids are `<prefix><index>`.
Dataset synthesize_corpus(const SynthConfig& cfg, const std::string& id_prefix = "utt");

}  // namespace camo
