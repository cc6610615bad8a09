// camo/asr/decode.hpp

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

#include <string>

#include <ATen/core/Tensor.h>

namespace camo {

class CharNgramLm;

/// Best path: per-frame argmax (lowest index wins ties), collapse repeats,
/// drop blanks. `log_probs` is [T, C].
std::string greedy_decode(const at::Tensor& log_probs);

struct BeamOptions {
  int beam_width = 16;
  double lm_weight = 0.0;
  double word_bonus = 0.0;
};

/// Beam search over CTC alignment states (prefix, last emitted symbol).
///
/// A hypothesis scores
///   max-path acoustic log-prob + lm_weight * LM log-prob + word_bonus * words
/// and states reached by several paths keep their best path. With width 1
/// and no LM this reproduces greedy_decode; with an unbounded width it is
/// exact search over label sequences under the same score.
std::string beam_decode(const at::Tensor& log_probs, const CharNgramLm* lm, const BeamOptions& opts);

}  // namespace camo
