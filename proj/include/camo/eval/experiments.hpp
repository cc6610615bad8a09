// camo/eval/experiments.hpp

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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "camo/asr/backend.hpp"
#include "camo/attack/pgd.hpp"
#include "camo/data/dataset.hpp"
#include "camo/defense/training.hpp"
#include "camo/eval/metrics.hpp"
#include "camo/predictor/predictor.hpp"
#include "camo/stream/plan.hpp"

namespace camo {

struct TimingResult {
  double mean = 0.0;  // seconds
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  int runs = 0;
  int warmup = 0;
  nlohmann::json to_json() const;
};

/// Mean wall time of `generate` over `runs` calls after `warmup` untimed calls.
TimingResult measure_attack_time(const std::function<void()>& generate, int runs = 200, int warmup = 5);

/// Times one chunk request on a random 2 s context.
TimingResult measure_generator_time(ChunkGenerator& gen, const StreamClock& clock, int runs = 200, int warmup = 5,
                                    std::uint64_t seed = 1);

struct AttackSettings {
  double multiplier = 0.008;
  StreamClock clock;
  PgdConfig pgd;
  int pgd_steps_denoised = 30;  // PGD steps when a denoiser is in the loop
  std::uint64_t seed = 1;
  EpsilonBinding binding = EpsilonBinding::kCausal;
  int batch_size = 16;

  nlohmann::json to_json() const;
  static AttackSettings from_json(const nlohmann::json& j);
};

struct AttackOutcome {
  Provenance attack = Provenance::kNone;
  std::vector<Waveform> attacked;
  std::vector<AttackPlan> plans;  // streaming attacks only
  double covered_seconds = 0.0;
  double max_latency = 0.0;
  bool realtime_feasible = true;
};

/// Attacks every utterance of `data`. Streaming attacks go through the
/// scheduler; offline PGD attacks whole utterances with the true
/// transcripts. `predictor` is required for the predictive attack.
AttackOutcome run_attack(Provenance attack, AsrBackend& target, const PredictorModel* predictor, const Dataset& data,
                         const AttackSettings& s, bool denoiser_in_loop = false);

struct Score {
  double wer = 0.0;
  double cer = 0.0;
  CorpusErrors errors;
  std::vector<std::string> hyps;
};

Score score_audio(AsrBackend& target, const Dataset& data, const std::vector<Waveform>& audio, int batch_size = 16);
Score score_clean(AsrBackend& target, const Dataset& data, int batch_size = 16);

/// One defense column: the pipeline under test plus the predictor trained
/// against it (null: predictive cells are skipped).
struct DefenseSetup {
  std::string name;
  std::shared_ptr<AsrBackend> target;
  PredictorModel predictor{nullptr};
  bool denoiser_in_loop = false;
};

struct GridRow {
  std::string attack;
  std::string defense;
  double m = 0.0;
  double delta = 0.0;
  double wer = 0.0;
  double cer = 0.0;
  double runtime_s = 0.0;
  bool realtime = true;  // false for non-causal attacks
  bool feasible = true;  // generation latency below delta
  double covered_s = 0.0;
  nlohmann::json to_json() const;
};

struct GridConfig {
  AttackSettings settings;
  std::vector<Provenance> attacks{Provenance::kNone, Provenance::kUniform, Provenance::kPgdOnline,
                                  Provenance::kPredictive, Provenance::kPgdOffline};
  int timing_runs = 20;
  int timing_warmup = 2;
};

std::vector<GridRow> evaluate_grid(const std::vector<DefenseSetup>& defenses, const Dataset& data,
                                   const GridConfig& cfg);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;         // WER
  double y_scaled = 0.0;  // coverage-scaled WER (delay sweeps)
  double cer = 0.0;
  double y_lo = 0.0;      // band over seeds (amplitude sweeps)
  double y_hi = 0.0;
  double covered_s = 0.0;
};

struct Curve {
  std::string name;
  std::string x_label;
  std::vector<CurvePoint> points;
  double clean_wer = 0.0;
  nlohmann::json to_json() const;
};

/// Plans computed at the settings' delay, shifted to each delta, scored
/// raw and coverage-scaled.
Curve delay_sweep(PredictorModel& predictor, AsrBackend& target, const Dataset& data, const AttackSettings& s,
                  const std::vector<double>& deltas);

/// One freshly trained predictor per delta, each evaluated at its own delta.
Curve delay_sweep_retrained(AsrBackend& target, const Dataset& train, const Dataset& test, const TrainConfig& base,
                            const PredictorArchitecture& arch, const std::vector<double>& deltas,
                            const AttackSettings& s);

/// One predictor per (m, seed); y is the mean WER over seeds, y_lo/y_hi
/// the extremes. m = 0 needs no training and scores the clean baseline.
Curve amplitude_sweep(AsrBackend& target, const Dataset& train, const Dataset& test, const TrainConfig& base,
                      const PredictorArchitecture& arch, const std::vector<double>& multipliers,
                      const std::vector<std::uint64_t>& seeds, const AttackSettings& s);

struct SwapResult {
  double clean_wer = 0.0, clean_cer = 0.0;
  double matched_wer = 0.0, matched_cer = 0.0;
  double swapped_wer = 0.0, swapped_cer = 0.0;
  std::vector<std::size_t> permutation;
  nlohmann::json to_json() const;
};

/// Matched predictive plans against plans swapped by a random derangement.
SwapResult swap_experiment(PredictorModel& predictor, AsrBackend& target, const Dataset& data,
                           const AttackSettings& s);

struct WordStats {
  std::string word;
  int count = 0;
  int length = 0;
  double clean_accuracy = 0.0;
  double attacked_accuracy = 0.0;
  double drop() const { return clean_accuracy - attacked_accuracy; }
};

struct WordAnalysis {
  std::vector<WordStats> words;      // sorted by word
  std::vector<WordStats> easiest;    // largest accuracy drop first
  std::vector<WordStats> hardest;    // smallest accuracy drop first
  double length_drop_correlation = 0.0;
  double count_drop_correlation = 0.0;
  nlohmann::json to_json() const;
};

/// A reference word occurrence is correct when the word alignment maps it
/// to an identical hypothesis word.
WordAnalysis per_word_analysis(const std::vector<std::string>& refs, const std::vector<std::string>& clean_hyps,
                               const std::vector<std::string>& attacked_hyps, std::size_t top_n = 50);

/// Pearson correlation; 0 when either side has no variance.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace camo
