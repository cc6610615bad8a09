// src/stream/plan.cpp

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

#include "camo/stream/plan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "camo/audio/wav_io.hpp"
#include "camo/core/error.hpp"

namespace camo {

void StreamClock::validate() const {
  if (!(delay >= 0.0) || !(chunk > 0.0) || !(context > 0.0) || sample_rate <= 0)
    throw DomainError("stream clock needs delay >= 0, r > 0 and context > 0");
  if (chunk_samples() <= 0) throw DomainError("stream clock: chunk shorter than one sample");
}

std::int64_t StreamClock::slot_count(std::int64_t n) const {
  const auto first = context_samples() + delay_samples();
  if (n <= first) return 0;
  const auto r = chunk_samples();
  return (n - first + r - 1) / r;
}

nlohmann::json StreamClock::to_json() const {
  return {{"delta", delay}, {"r", chunk}, {"context", context}, {"sample_rate", sample_rate}};
}

StreamClock StreamClock::from_json(const nlohmann::json& j) {
  StreamClock c;
  c.delay = j.value("delta", c.delay);
  c.chunk = j.value("r", c.chunk);
  c.context = j.value("context", c.context);
  c.sample_rate = j.value("sample_rate", c.sample_rate);
  c.validate();
  return c;
}

std::int64_t AttackPlan::covered_samples() const {
  std::int64_t n = 0;
  for (const auto& c : chunks) n += c.perturbation.samples.size();
  return n;
}

double AttackPlan::max_latency() const {
  double m = 0.0;
  for (const auto& c : chunks) m = std::max(m, c.latency);
  return m;
}

bool AttackPlan::realtime_feasible() const { return max_latency() < clock.delay; }

ScheduleResult schedule_stream(const Waveform& stream, ChunkGenerator& gen, const StreamClock& clock,
                               double multiplier, EpsilonBinding binding) {
  clock.validate();
  if (stream.sample_rate != clock.sample_rate) throw DomainError("schedule_stream: sample-rate mismatch");
  if (multiplier < 0) throw DomainError("schedule_stream: negative multiplier");
  ScheduleResult out;
  out.attacked = stream;
  out.plan.clock = clock;
  out.plan.source = gen.provenance();
  out.plan.stream_length = stream.size();

  const auto n = stream.size();
  const auto slots = clock.slot_count(n);
  const auto d = clock.delay_samples();
  const auto full = compute_epsilon(stream, multiplier);
  float running_peak = 0.0f;
  std::int64_t peak_upto = 0;
  for (std::int64_t k = 0; k < slots; ++k) {
    ChunkRequest req;
    req.slot = k;
    req.context_end = clock.context_end(k);
    req.length = clock.chunk_samples();
    req.clock = &clock;
    const auto observed = stream.view().first(static_cast<std::size_t>(std::min(req.context_end, n)));
    if (binding == EpsilonBinding::kCausal) {
      for (; peak_upto < static_cast<std::int64_t>(observed.size()); ++peak_upto)
        running_peak = std::max(running_peak, std::abs(observed[static_cast<std::size_t>(peak_upto)]));
      req.budget = {multiplier, static_cast<float>(multiplier * running_peak)};
    } else {
      req.budget = full;
    }

    const auto t0 = std::chrono::steady_clock::now();
    auto p = gen.generate(observed, req);
    const auto t1 = std::chrono::steady_clock::now();
    if (p.samples.size() != req.length)
      throw DomainError("chunk generator returned " + std::to_string(p.samples.size()) + " samples, expected " +
                        std::to_string(req.length));

    AttackChunk c;
    c.start = req.context_end + d;
    c.latency = std::chrono::duration<double>(t1 - t0).count();
    p.samples.samples.resize(static_cast<std::size_t>(std::min(req.length, n - c.start)));
    c.perturbation = std::move(p);
    out.plan.chunks.push_back(std::move(c));
  }
  out.attacked = apply_plan(stream, out.plan);
  return out;
}

Waveform apply_plan(const Waveform& clean, const AttackPlan& plan) {
  Waveform out = clean;
  for (const auto& c : plan.chunks) {
    if (c.perturbation.samples.sample_rate != clean.sample_rate) throw DomainError("apply_plan: sample-rate mismatch");
    mix_into(out.samples, c.perturbation.samples.view(), c.start);
  }
  return out;
}

AttackPlan shift_plan(const AttackPlan& plan, double new_delay) {
  if (!(new_delay >= 0)) throw DomainError("shift_plan: negative delay");
  AttackPlan out = plan;
  out.clock.delay = new_delay;
  const auto shift = out.clock.delay_samples() - plan.clock.delay_samples();
  out.chunks.clear();
  for (const auto& c : plan.chunks) {
    AttackChunk s = c;
    s.start = c.start + shift;
    if (s.start >= plan.stream_length) continue;
    auto& v = s.perturbation.samples.samples;
    v.resize(static_cast<std::size_t>(std::min<std::int64_t>(static_cast<std::int64_t>(v.size()),
                                                             plan.stream_length - s.start)));
    out.chunks.push_back(std::move(s));
  }
  return out;
}

double coverage_scaled_error(double raw_error, double clean_error, double active_ref, double active_test) {
  if (!(active_test > 0)) throw DomainError("coverage_scaled_error: active_test must be positive");
  return clean_error + (raw_error - clean_error) * active_ref / active_test;
}

std::vector<AttackPlan> swap_attacks(const std::vector<AttackPlan>& plans, const std::vector<std::size_t>& perm) {
  if (perm.size() != plans.size()) throw DomainError("swap_attacks: permutation size mismatch");
  std::vector<AttackPlan> out;
  out.reserve(plans.size());
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (perm[i] >= plans.size()) throw DomainError("swap_attacks: index out of range");
    const auto& donor = plans[perm[i]];
    AttackPlan r = plans[i];
    if (perm[i] == i) {
      out.push_back(std::move(r));
      continue;
    }
    r.source = donor.source;
    for (std::size_t j = 0; j < r.chunks.size(); ++j) {
      auto& slot = r.chunks[j];
      const auto len = slot.perturbation.samples.size();
      std::vector<float> v(static_cast<std::size_t>(len), 0.0f);
      if (!donor.chunks.empty()) {
        const auto& d = donor.chunks[j % donor.chunks.size()].perturbation;
        const float eps_r = slot.perturbation.budget.epsilon;
        const float eps_d = d.budget.epsilon;
        const float scale = eps_d > 0 ? eps_r / eps_d : 0.0f;
        const auto m = std::min<std::size_t>(v.size(), d.samples.samples.size());
        for (std::size_t t = 0; t < m; ++t) v[t] = std::clamp(d.samples.samples[t] * scale, -eps_r, eps_r);
      }
      slot.perturbation.samples.samples = std::move(v);
      slot.perturbation.provenance = donor.source;
      slot.latency = 0.0;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::size_t> random_derangement(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw DomainError("random_derangement: need at least two items");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> p(n);
  for (;;) {
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) ok = p[i] != i;
    if (ok) return p;
  }
}

nlohmann::json plan_summary(const AttackPlan& plan) {
  nlohmann::json chunks = nlohmann::json::array();
  for (const auto& c : plan.chunks)
    chunks.push_back({{"start_s", c.start_seconds(plan.clock.sample_rate)},
                      {"start_sample", c.start},
                      {"length", c.perturbation.samples.size()},
                      {"epsilon", c.perturbation.budget.epsilon},
                      {"latency_s", c.latency}});
  return {{"clock", plan.clock.to_json()},
          {"source", to_string(plan.source)},
          {"stream_length", plan.stream_length},
          {"covered_s", plan.covered_seconds()},
          {"max_latency_s", plan.max_latency()},
          {"realtime_feasible", plan.realtime_feasible()},
          {"chunks", chunks}};
}

void write_plan(const std::filesystem::path& dir, const std::string& name, const AttackPlan& plan) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / (name + "_chunks"));
  auto j = plan_summary(plan);
  for (std::size_t i = 0; i < plan.chunks.size(); ++i) {
    const auto rel = fs::path(name + "_chunks") / ("chunk" + std::to_string(i) + ".wav");
    write_wav(dir / rel, plan.chunks[i].perturbation.samples);
    j["chunks"][i]["wav_path"] = rel.string();
    j["chunks"][i]["m"] = plan.chunks[i].perturbation.budget.multiplier;
  }
  std::ofstream os(dir / (name + ".json"));
  if (!os) throw FormatError("cannot write plan under '" + dir.string() + "'");
  os << j.dump(2) << '\n';
}

AttackPlan read_plan(const std::filesystem::path& json_path) {
  std::ifstream is(json_path);
  if (!is) throw FormatError("cannot open plan '" + json_path.string() + "'");
  AttackPlan p;
  try {
    auto j = nlohmann::json::parse(is);
    p.clock = StreamClock::from_json(j.at("clock"));
    p.source = parse_provenance(j.at("source").get<std::string>());
    p.stream_length = j.at("stream_length").get<std::int64_t>();
    for (const auto& c : j.at("chunks")) {
      AttackChunk chunk;
      chunk.start = c.at("start_sample").get<std::int64_t>();
      chunk.latency = c.value("latency_s", 0.0);
      chunk.perturbation.provenance = p.source;
      chunk.perturbation.budget = {c.value("m", 0.0), c.at("epsilon").get<float>()};
      auto w = read_wav(json_path.parent_path() / c.at("wav_path").get<std::string>());
      chunk.perturbation.samples = clip_to_budget(std::move(w), chunk.perturbation.budget);
      p.chunks.push_back(std::move(chunk));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("plan '" + json_path.string() + "': " + e.what());
  }
  return p;
}

}  // namespace camo
