// src/asr/decode.cpp

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

#include "camo/asr/decode.hpp"

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

#include <torch/torch.h>

#include "camo/asr/alphabet.hpp"
#include "camo/asr/lm.hpp"
#include "camo/core/error.hpp"

namespace camo {

namespace {

at::Tensor as_cpu_2d(const at::Tensor& log_probs) {
  if (log_probs.dim() != 2) throw DomainError("decode: expected [T, C] log-probabilities");
  return log_probs.detach().to(torch::kCPU, torch::kFloat64).contiguous();
}

struct Hyp {
  std::string prefix;
  int last = Alphabet::kBlank;
  double acoustic = 0.0;
  double lm = 0.0;
  int words = 0;

  double total(const BeamOptions& o) const { return acoustic + o.lm_weight * lm + o.word_bonus * words; }
};

}  // namespace

std::string greedy_decode(const at::Tensor& log_probs) {
  auto lp = as_cpu_2d(log_probs);
  const auto T = lp.size(0);
  const auto C = lp.size(1);
  const double* p = lp.data_ptr<double>();
  std::string out;
  int prev = Alphabet::kBlank;
  for (std::int64_t t = 0; t < T; ++t) {
    int best = 0;
    for (std::int64_t k = 1; k < C; ++k)
      if (p[t * C + k] > p[t * C + best]) best = static_cast<int>(k);
    if (best != Alphabet::kBlank && best != prev) out.push_back(Alphabet::symbol(best));
    prev = best;
  }
  return normalize_text(out);
}

std::string beam_decode(const at::Tensor& log_probs, const CharNgramLm* lm, const BeamOptions& opts) {
  if (opts.beam_width < 1) throw DomainError("beam_decode: beam_width must be >= 1");
  auto lp = as_cpu_2d(log_probs);
  const auto T = lp.size(0);
  const auto C = lp.size(1);
  const double* p = lp.data_ptr<double>();
  const bool use_lm = lm != nullptr && opts.lm_weight != 0.0;

  std::vector<Hyp> beam{Hyp{}};
  for (std::int64_t t = 0; t < T; ++t) {
    const double* row = p + t * C;
    std::vector<Hyp> candidates;
    candidates.reserve(beam.size() * static_cast<std::size_t>(C));
    std::map<std::pair<std::string, int>, std::size_t> index;
    for (const auto& h : beam) {
      for (int k = 0; k < C; ++k) {
        Hyp n = h;
        n.acoustic += row[k];
        n.last = k;
        if (k != Alphabet::kBlank && k != h.last) {
          const char c = Alphabet::symbol(k);
          if (use_lm) n.lm += lm->log_prob(h.prefix, c);
          if (c != ' ' && (h.prefix.empty() || h.prefix.back() == ' ')) n.words += 1;
          n.prefix.push_back(c);
        }
        auto key = std::make_pair(n.prefix, n.last);
        auto it = index.find(key);
        if (it == index.end()) {
          index.emplace(std::move(key), candidates.size());
          candidates.push_back(std::move(n));
        } else if (n.total(opts) > candidates[it->second].total(opts)) {
          candidates[it->second] = std::move(n);
        }
      }
    }
    // Stable: equal scores keep generation order (lower beam rank, then lower symbol).
    std::stable_sort(candidates.begin(), candidates.end(),
                     [&](const Hyp& a, const Hyp& b) { return a.total(opts) > b.total(opts); });
    if (candidates.size() > static_cast<std::size_t>(opts.beam_width))
      candidates.resize(static_cast<std::size_t>(opts.beam_width));
    beam = std::move(candidates);
  }

  // Several alignment states can share a prefix; the best one wins.
  const Hyp* best = &beam.front();
  for (const auto& h : beam)
    if (h.total(opts) > best->total(opts)) best = &h;
  // Edge and repeated spaces are not part of a transcript.
  return normalize_text(best->prefix);
}

}  // namespace camo
