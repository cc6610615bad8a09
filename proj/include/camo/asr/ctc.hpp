// camo/asr/ctc.hpp

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

/// Frames needed to align `labels`: one per label plus a separating blank
/// between every pair of equal neighbours.
std::int64_t ctc_min_frames(std::span<const int> labels);

/// -log P(labels | log_probs) by the forward recursion in log space.
/// `log_probs` is [T, C]. Throws AlignmentError when T < ctc_min_frames.
double ctc_nll(const at::Tensor& log_probs, std::span<const int> labels, int blank = 0);

/// Batched CTC loss with an analytic backward pass (alpha-beta).
///
/// `log_probs` is [B, T, C]; frame t of item b is valid when
/// t < input_lengths[b]. Returns the [B] per-item negative log-likelihoods.
/// Gradients flow to `log_probs` only. Targets may be empty (the all-blank
/// path). Infeasible items throw AlignmentError, or contribute a zero loss
/// and zero gradient when `zero_infeasible` is set.
at::Tensor ctc_loss(const at::Tensor& log_probs, std::span<const std::int64_t> input_lengths,
                    const std::vector<std::vector<int>>& targets, int blank = 0,
                    bool zero_infeasible = false);

}  // namespace camo
