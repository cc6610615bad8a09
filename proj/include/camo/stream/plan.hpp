// camo/stream/plan.hpp

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

// Record -> compute -> play timeline.
//
// With context c, chunk length r and delay d (all converted to whole
// samples), slot k has context end t_k = c + k*r and plays on
// [t_k + d, t_k + d + r), truncated at the end of the stream. Slots whose
// start is at or past the end are not scheduled.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "camo/attack/perturbation.hpp"
#include "camo/audio/waveform.hpp"

namespace camo {

struct StreamClock {
  double delay = 0.5;    // seconds
  double chunk = 0.5;    // r, seconds
  double context = 2.0;  // seconds
  int sample_rate = kSampleRate;

  void validate() const;
  std::int64_t delay_samples() const { return seconds_to_samples(delay, sample_rate); }
  std::int64_t chunk_samples() const { return seconds_to_samples(chunk, sample_rate); }
  std::int64_t context_samples() const { return seconds_to_samples(context, sample_rate); }

  /// Context end of slot k.
  std::int64_t context_end(std::int64_t k) const { return context_samples() + k * chunk_samples(); }
  /// Number of slots whose start falls inside a stream of `n` samples.
  std::int64_t slot_count(std::int64_t n) const;

  nlohmann::json to_json() const;
  static StreamClock from_json(const nlohmann::json& j);
};

struct AttackChunk {
  std::int64_t start = 0;  // sample index of the first perturbed sample
  Perturbation perturbation;
  double latency = 0.0;  // seconds spent generating it

  double start_seconds(int rate = kSampleRate) const { return static_cast<double>(start) / rate; }
  std::int64_t end() const { return start + perturbation.samples.size(); }
};

struct AttackPlan {
  StreamClock clock;
  Provenance source = Provenance::kNone;
  std::int64_t stream_length = 0;  // samples
  std::vector<AttackChunk> chunks;

  std::int64_t covered_samples() const;
  double covered_seconds() const { return static_cast<double>(covered_samples()) / clock.sample_rate; }
  double max_latency() const;
  /// Every chunk was generated in less than the delay.
  bool realtime_feasible() const;
};

/// What the scheduler hands a generator for slot k. The generator also
/// receives the observed prefix [0, context_end) of the stream and nothing
/// after it.
struct ChunkRequest {
  std::int64_t slot = 0;
  std::int64_t context_end = 0;
  std::int64_t length = 0;  // r in samples
  AttackBudget budget;
  const StreamClock* clock = nullptr;
};

class ChunkGenerator {
 public:
  virtual ~ChunkGenerator() = default;
  virtual Provenance provenance() const = 0;
  /// Returns `req.length` samples bounded by `req.budget.epsilon`.
  virtual Perturbation generate(std::span<const float> observed, const ChunkRequest& req) = 0;
};

enum class EpsilonBinding {
  kCausal,         // running max of the observed prefix
  kFullUtterance,  // max of the whole stream (non-causal)
};

struct ScheduleResult {
  Waveform attacked;
  AttackPlan plan;
};

/// Runs `gen` once per slot and mixes the chunks into the stream.
ScheduleResult schedule_stream(const Waveform& stream, ChunkGenerator& gen, const StreamClock& clock,
                               double multiplier, EpsilonBinding binding = EpsilonBinding::kCausal);

/// Adds every chunk of `plan` to `clean`.
Waveform apply_plan(const Waveform& clean, const AttackPlan& plan);

/// Moves all chunks by (new_delay - old_delay), truncating at the stream end
/// and dropping chunks that start past it. Chunk contents are unchanged.
AttackPlan shift_plan(const AttackPlan& plan, double new_delay);

/// clean + (raw - clean) * active_ref / active_test.
double coverage_scaled_error(double raw_error, double clean_error, double active_ref, double active_test);

/// Plan i receives the chunk waveforms of plan perm[i], tiled over its own
/// slots (donor chunk j mod n_donor), cut or zero-padded to the slot
/// length and rescaled by eps_recipient / eps_donor. The recipient's timing
/// grid is kept.
std::vector<AttackPlan> swap_attacks(const std::vector<AttackPlan>& plans, const std::vector<std::size_t>& perm);

/// Derangement of 0..n-1 (n >= 2), deterministic in `seed`.
std::vector<std::size_t> random_derangement(std::size_t n, std::uint64_t seed);

/// Writes `<dir>/<name>.json` plus one WAV per chunk under `<dir>/<name>_chunks/`.
void write_plan(const std::filesystem::path& dir, const std::string& name, const AttackPlan& plan);
/// Reads a plan written by write_plan(). Chunk audio is re-read from WAV
/// (16-bit quantized).
AttackPlan read_plan(const std::filesystem::path& json_path);

nlohmann::json plan_summary(const AttackPlan& plan);

}  // namespace camo
