// src/attack/pgd.cpp

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

#include "camo/attack/pgd.hpp"

#include <torch/torch.h>

#include "camo/asr/alphabet.hpp"
#include "camo/core/error.hpp"
#include "camo/core/rng.hpp"

namespace camo {

void PgdConfig::validate() const {
  if (steps < 0) throw DomainError("pgd: steps must be >= 0");
  if (!(step_fraction > 0.0 && step_fraction <= 1.0)) throw DomainError("pgd: step fraction must be in (0, 1]");
  if (!(multiplier >= 0.0)) throw DomainError("pgd: negative multiplier");
}

nlohmann::json PgdConfig::to_json() const {
  return {{"steps", steps}, {"step_fraction", step_fraction}, {"m", multiplier}};
}

PgdConfig PgdConfig::from_json(const nlohmann::json& j) {
  PgdConfig c;
  c.steps = j.value("steps", c.steps);
  c.step_fraction = j.value("step_fraction", c.step_fraction);
  c.multiplier = j.value("m", c.multiplier);
  c.validate();
  return c;
}

at::Tensor pgd_batch(AsrBackend& asr, const at::Tensor& clean, std::span<const std::int64_t> lengths,
                     const std::vector<std::vector<int>>& targets, const at::Tensor& eps, const PgdConfig& cfg,
                     const PgdObserver& observer) {
  cfg.validate();
  require_gradients(asr, "PGD");
  const auto B = clean.size(0), N = clean.size(1);
  if (eps.numel() != B) throw DomainError("pgd: one epsilon per batch item expected");
  auto hi = eps.to(torch::kFloat).reshape({B, 1});
  auto lo = -hi;
  auto step = (hi * static_cast<float>(cfg.step_fraction));
  auto mask = torch::arange(N).unsqueeze(0) < torch::tensor(std::vector<std::int64_t>(lengths.begin(), lengths.end())).unsqueeze(1);
  mask = mask.to(torch::kFloat);

  auto alpha = torch::zeros_like(clean);
  for (int s = 0; s < cfg.steps; ++s) {
    auto a = alpha.detach().requires_grad_(true);
    auto loss = asr.loss(clean + a, lengths, targets).sum();
    auto g = torch::autograd::grad({loss}, {a})[0];
    torch::NoGradGuard no_grad;
    alpha = torch::min(torch::max(alpha + step * torch::sign(g), lo), hi) * mask;
    if (observer) observer(s + 1, alpha);
  }
  return alpha.detach();
}

std::vector<Perturbation> pgd_offline_batch(AsrBackend& asr, const std::vector<const Waveform*>& batch,
                                            const std::vector<std::string>& transcripts, const PgdConfig& cfg) {
  if (batch.size() != transcripts.size()) throw DomainError("pgd: one transcript per waveform expected");
  std::vector<std::vector<int>> targets;
  std::vector<AttackBudget> budgets;
  std::vector<float> eps;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto t = normalize_text(transcripts[i]);
    if (t.empty()) throw DomainError("pgd_offline: empty transcript");
    targets.push_back(Alphabet::encode(t));
    budgets.push_back(compute_epsilon(*batch[i], cfg.multiplier));
    eps.push_back(budgets.back().epsilon);
  }
  std::vector<std::int64_t> lengths;
  auto x = stack_padded(batch, &lengths);
  auto alpha = pgd_batch(asr, x, lengths, targets, torch::tensor(eps), cfg);
  std::vector<Perturbation> out;
  for (std::size_t i = 0; i < batch.size(); ++i)
    out.push_back({from_tensor(alpha[static_cast<std::int64_t>(i)].slice(0, 0, lengths[i])), budgets[i],
                   Provenance::kPgdOffline});
  return out;
}

Perturbation pgd_offline(AsrBackend& asr, const Waveform& w, const std::string& transcript, const PgdConfig& cfg,
                         const PgdObserver& observer) {
  require_valid(w);
  const auto t = normalize_text(transcript);
  if (t.empty()) throw DomainError("pgd_offline: empty transcript");
  const auto budget = compute_epsilon(w, cfg.multiplier);
  const std::int64_t len = w.size();
  auto alpha = pgd_batch(asr, to_tensor(w).unsqueeze(0), std::span<const std::int64_t>(&len, 1),
                         {Alphabet::encode(t)}, torch::tensor({budget.epsilon}), cfg, observer);
  return {from_tensor(alpha[0]), budget, Provenance::kPgdOffline};
}

OnlinePgdGenerator::OnlinePgdGenerator(AsrBackend& asr, PgdConfig cfg, PgdObserver observer)
    : asr_(asr), cfg_(cfg), observer_(std::move(observer)) {
  cfg_.validate();
  require_gradients(asr_, "online PGD");
}

Perturbation OnlinePgdGenerator::generate(std::span<const float> observed, const ChunkRequest& req) {
  const auto ctx = req.clock->context_samples();
  const auto end = static_cast<std::int64_t>(observed.size());
  const auto begin = std::max<std::int64_t>(0, end - ctx);
  auto window = to_tensor(observed.subspan(static_cast<std::size_t>(begin))).unsqueeze(0);
  const std::int64_t len = end - begin;
  std::span<const std::int64_t> lengths(&len, 1);
  const auto pseudo = asr_.transcribe(window, lengths).front();
  auto alpha = pgd_batch(asr_, window, lengths, {Alphabet::encode(pseudo)}, torch::tensor({req.budget.epsilon}), cfg_,
                         observer_)[0];
  auto tail = alpha.slice(0, std::max<std::int64_t>(0, len - req.length), len);
  if (tail.size(0) < req.length) tail = torch::cat({torch::zeros({req.length - tail.size(0)}), tail});
  return {from_tensor(tail), req.budget, Provenance::kPgdOnline};
}

ScheduleResult pgd_online(AsrBackend& asr, const Waveform& stream, const StreamClock& clock, const PgdConfig& cfg,
                          const PgdObserver& observer) {
  OnlinePgdGenerator gen(asr, cfg, observer);
  return schedule_stream(stream, gen, clock, cfg.multiplier);
}

Perturbation UniformNoiseGenerator::generate(std::span<const float>, const ChunkRequest& req) {
  return uniform_noise(req.length, req.budget, derive_seed(seed_, static_cast<std::uint64_t>(req.slot)));
}

}  // namespace camo
