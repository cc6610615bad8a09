// src/attack/perturbation.cpp

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

#include "camo/attack/perturbation.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "camo/audio/wav_io.hpp"
#include "camo/core/error.hpp"

namespace camo {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::kNone: return "none";
    case Provenance::kUniform: return "uniform";
    case Provenance::kPgdOffline: return "pgd-offline";
    case Provenance::kPgdOnline: return "pgd-online";
    case Provenance::kPredictive: return "predictive";
  }
  return "none";
}

Provenance parse_provenance(const std::string& s) {
  std::string k = s;
  std::replace(k.begin(), k.end(), '_', '-');
  for (auto p : {Provenance::kNone, Provenance::kUniform, Provenance::kPgdOffline, Provenance::kPgdOnline,
                 Provenance::kPredictive})
    if (to_string(p) == k) return p;
  throw DomainError("unknown attack '" + s + "' (expected none|uniform|pgd-offline|pgd-online|predictive)");
}

Perturbation uniform_noise(std::int64_t length, const AttackBudget& budget, std::uint64_t seed) {
  if (length <= 0) throw DomainError("uniform_noise: length must be positive");
  if (!(budget.epsilon >= 0.0f)) throw DomainError("uniform_noise: negative epsilon");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const float eps = budget.epsilon;
  std::vector<float> s(static_cast<std::size_t>(length));
  for (auto& v : s) v = std::clamp(static_cast<float>(u(rng) * eps), -eps, eps);
  return {Waveform(std::move(s)), budget, Provenance::kUniform};
}

void export_perturbation(const std::filesystem::path& stem, const Perturbation& p, const PerturbationInfo& info) {
  auto wav = stem;
  wav += ".wav";
  auto side = stem;
  side += ".json";
  write_wav(wav, p.samples);
  nlohmann::json j{{"provenance", to_string(p.provenance)},
                   {"epsilon", p.budget.epsilon},
                   {"m", p.budget.multiplier},
                   {"delta", info.delay},
                   {"r", info.chunk},
                   {"seed", info.seed}};
  std::ofstream(side) << j.dump(2) << '\n';
}

}  // namespace camo
