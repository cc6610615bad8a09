// camo/attack/perturbation.hpp

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
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "camo/audio/waveform.hpp"

namespace camo {

enum class Provenance { kNone, kUniform, kPgdOffline, kPgdOnline, kPredictive };

std::string to_string(Provenance p);
/// Accepts "none", "uniform", "pgd-offline", "pgd-online", "predictive"
/// (underscores also accepted). Throws DomainError otherwise.
Provenance parse_provenance(const std::string& s);

/// Additive attack samples with the budget they were generated under.
/// Invariant: max|samples| <= budget.epsilon.
struct Perturbation {
  Waveform samples;
  AttackBudget budget;
  Provenance provenance = Provenance::kNone;

  float linf() const { return samples.peak(); }
  bool within_budget() const { return linf() <= budget.epsilon; }
};

/// I.i.d. uniform samples on [-eps, eps], deterministic in `seed`.
Perturbation uniform_noise(std::int64_t length, const AttackBudget& budget, std::uint64_t seed);

/// Extra fields recorded in the sidecar next to an exported perturbation.
struct PerturbationInfo {
  double delay = 0.0;
  double chunk = 0.0;
  std::uint64_t seed = 0;
};

/// Writes `<stem>.wav` and a `<stem>.json` sidecar
/// {provenance, epsilon, m, delta, r, seed}.
void export_perturbation(const std::filesystem::path& stem, const Perturbation& p, const PerturbationInfo& info);

}  // namespace camo
