// src/eval/experiments.cpp

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

#include "camo/eval/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <torch/torch.h>

#include "camo/asr/alphabet.hpp"
#include "camo/core/error.hpp"
#include "camo/core/rng.hpp"

namespace camo {

nlohmann::json TimingResult::to_json() const {
  return {{"mean_s", mean}, {"stddev_s", stddev}, {"min_s", min}, {"max_s", max}, {"runs", runs}, {"warmup", warmup}};
}

TimingResult measure_attack_time(const std::function<void()>& generate, int runs, int warmup) {
  if (runs < 1) throw DomainError("measure_attack_time: runs must be >= 1");
  for (int i = 0; i < warmup; ++i) generate();
  std::vector<double> t(static_cast<std::size_t>(runs));
  for (auto& v : t) {
    const auto a = std::chrono::steady_clock::now();
    generate();
    v = std::chrono::duration<double>(std::chrono::steady_clock::now() - a).count();
  }
  TimingResult r;
  r.runs = runs;
  r.warmup = warmup;
  r.mean = std::accumulate(t.begin(), t.end(), 0.0) / runs;
  double var = 0.0;
  for (double v : t) var += (v - r.mean) * (v - r.mean);
  r.stddev = std::sqrt(var / runs);
  r.min = *std::min_element(t.begin(), t.end());
  r.max = *std::max_element(t.begin(), t.end());
  return r;
}

namespace {

Waveform random_context(const StreamClock& clock, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, 0.1f);
  std::vector<float> s(static_cast<std::size_t>(clock.context_samples()));
  for (auto& v : s) v = std::clamp(g(rng), -1.0f, 1.0f);
  return Waveform(std::move(s), clock.sample_rate);
}

PgdConfig pgd_for(const AttackSettings& s, bool denoiser_in_loop) {
  PgdConfig c = s.pgd;
  c.multiplier = s.multiplier;
  if (denoiser_in_loop) c.steps = s.pgd_steps_denoised;
  return c;
}

}  // namespace

TimingResult measure_generator_time(ChunkGenerator& gen, const StreamClock& clock, int runs, int warmup,
                                    std::uint64_t seed) {
  const auto ctx = random_context(clock, seed);
  ChunkRequest req;
  req.context_end = ctx.size();
  req.length = clock.chunk_samples();
  req.budget = compute_epsilon(ctx, 0.008);
  req.clock = &clock;
  return measure_attack_time([&] { gen.generate(ctx.view(), req); }, runs, warmup);
}

nlohmann::json AttackSettings::to_json() const {
  return {{"m", multiplier},
          {"clock", clock.to_json()},
          {"pgd", pgd.to_json()},
          {"pgd_steps_denoised", pgd_steps_denoised},
          {"seed", seed},
          {"epsilon_binding", binding == EpsilonBinding::kCausal ? "causal" : "full"},
          {"batch_size", batch_size}};
}

AttackSettings AttackSettings::from_json(const nlohmann::json& j) {
  AttackSettings s;
  s.multiplier = j.value("m", s.multiplier);
  if (j.contains("clock")) s.clock = StreamClock::from_json(j["clock"]);
  if (j.contains("pgd")) s.pgd = PgdConfig::from_json(j["pgd"]);
  s.pgd_steps_denoised = j.value("pgd_steps_denoised", s.pgd_steps_denoised);
  s.seed = j.value("seed", s.seed);
  const auto b = j.value("epsilon_binding", std::string("causal"));
  if (b != "causal" && b != "full") throw DomainError("epsilon_binding must be causal or full");
  s.binding = b == "causal" ? EpsilonBinding::kCausal : EpsilonBinding::kFullUtterance;
  s.batch_size = j.value("batch_size", s.batch_size);
  return s;
}

AttackOutcome run_attack(Provenance attack, AsrBackend& target, const PredictorModel* predictor, const Dataset& data,
                         const AttackSettings& s, bool denoiser_in_loop) {
  AttackOutcome out;
  out.attack = attack;
  auto stream_with = [&](auto make_gen) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto gen = make_gen(i);
      auto r = schedule_stream(data[i].audio, *gen, s.clock, s.multiplier, s.binding);
      out.covered_seconds += r.plan.covered_seconds();
      out.max_latency = std::max(out.max_latency, r.plan.max_latency());
      out.attacked.push_back(std::move(r.attacked));
      out.plans.push_back(std::move(r.plan));
    }
    out.realtime_feasible = out.max_latency < s.clock.delay;
  };

  switch (attack) {
    case Provenance::kNone:
      for (const auto& u : data) out.attacked.push_back(u.audio);
      break;
    case Provenance::kUniform: {
      const auto root = derive_seed(s.seed, "uniform");
      stream_with([&](std::size_t i) { return std::make_unique<UniformNoiseGenerator>(derive_seed(root, i)); });
      break;
    }
    case Provenance::kPgdOnline: {
      const auto cfg = pgd_for(s, denoiser_in_loop);
      stream_with([&](std::size_t) { return std::make_unique<OnlinePgdGenerator>(target, cfg); });
      break;
    }
    case Provenance::kPredictive: {
      if (!predictor || !*predictor) throw DomainError("predictive attack needs a predictor");
      stream_with([&](std::size_t) { return std::make_unique<PredictiveGenerator>(*predictor); });
      break;
    }
    case Provenance::kPgdOffline: {
      const auto cfg = pgd_for(s, denoiser_in_loop);
      out.realtime_feasible = false;
      for (std::size_t b = 0; b < data.size(); b += static_cast<std::size_t>(s.batch_size)) {
        const auto e = std::min(data.size(), b + static_cast<std::size_t>(s.batch_size));
        std::vector<const Waveform*> ptrs;
        std::vector<std::string> refs;
        for (auto i = b; i < e; ++i) {
          ptrs.push_back(&data[i].audio);
          refs.push_back(data[i].transcript);
        }
        auto perts = pgd_offline_batch(target, ptrs, refs, cfg);
        for (std::size_t k = 0; k < perts.size(); ++k) {
          Waveform w = *ptrs[k];
          mix_into(w.samples, perts[k].samples.view(), 0);
          out.covered_seconds += w.duration();
          out.attacked.push_back(std::move(w));
        }
      }
      break;
    }
  }
  return out;
}

Score score_audio(AsrBackend& target, const Dataset& data, const std::vector<Waveform>& audio, int batch_size) {
  if (audio.size() != data.size()) throw DomainError("score_audio: one waveform per utterance expected");
  Score sc;
  for (std::size_t b = 0; b < audio.size(); b += static_cast<std::size_t>(batch_size)) {
    const auto e = std::min(audio.size(), b + static_cast<std::size_t>(batch_size));
    std::vector<const Waveform*> ptrs;
    for (auto i = b; i < e; ++i) ptrs.push_back(&audio[i]);
    std::vector<std::int64_t> lengths;
    auto x = stack_padded(ptrs, &lengths);
    auto hyp = target.transcribe(x, lengths);
    sc.hyps.insert(sc.hyps.end(), hyp.begin(), hyp.end());
  }
  for (std::size_t i = 0; i < data.size(); ++i) sc.errors.add(data[i].transcript, sc.hyps[i]);
  sc.wer = sc.errors.wer();
  sc.cer = sc.errors.cer();
  return sc;
}

Score score_clean(AsrBackend& target, const Dataset& data, int batch_size) {
  std::vector<Waveform> audio;
  for (const auto& u : data) audio.push_back(u.audio);
  return score_audio(target, data, audio, batch_size);
}

nlohmann::json GridRow::to_json() const {
  return {{"attack", attack},   {"defense", defense},   {"m", m},
          {"delta", delta},     {"wer", wer},           {"cer", cer},
          {"runtime_s", runtime_s}, {"realtime", realtime}, {"feasible", feasible},
          {"covered_s", covered_s}};
}

std::vector<GridRow> evaluate_grid(const std::vector<DefenseSetup>& defenses, const Dataset& data,
                                   const GridConfig& cfg) {
  if (defenses.empty()) throw DomainError("evaluate_grid: no defense columns");
  const auto& s = cfg.settings;
  std::vector<GridRow> rows;
  for (auto attack : cfg.attacks) {
    // one run-time figure per approach, measured against the first column
    double runtime = 0.0;
    {
      const auto& d0 = defenses.front();
      std::unique_ptr<ChunkGenerator> gen;
      if (attack == Provenance::kUniform) gen = std::make_unique<UniformNoiseGenerator>(s.seed);
      if (attack == Provenance::kPgdOnline) gen = std::make_unique<OnlinePgdGenerator>(*d0.target, pgd_for(s, false));
      if (attack == Provenance::kPredictive && d0.predictor) gen = std::make_unique<PredictiveGenerator>(d0.predictor);
      if (gen) {
        runtime = measure_generator_time(*gen, s.clock, cfg.timing_runs, cfg.timing_warmup, s.seed).mean;
      } else if (attack == Provenance::kPgdOffline) {
        const auto ctx = random_context(s.clock, s.seed);
        const auto pgd = pgd_for(s, false);
        runtime = measure_attack_time([&] { pgd_offline(*d0.target, ctx, "the", pgd); }, cfg.timing_runs,
                                      cfg.timing_warmup)
                      .mean;
      }
    }
    for (const auto& d : defenses) {
      if (attack == Provenance::kPredictive && !d.predictor) continue;
      const bool white_box_needed = attack == Provenance::kPgdOnline || attack == Provenance::kPgdOffline;
      if (white_box_needed && !d.target->differentiable()) continue;
      auto outcome = run_attack(attack, *d.target, d.predictor ? &d.predictor : nullptr, data, s, d.denoiser_in_loop);
      auto sc = score_audio(*d.target, data, outcome.attacked, s.batch_size);
      GridRow r;
      r.attack = to_string(attack);
      r.defense = d.name;
      r.m = attack == Provenance::kNone ? 0.0 : s.multiplier;
      r.delta = s.clock.delay;
      r.wer = sc.wer;
      r.cer = sc.cer;
      r.runtime_s = runtime;
      r.realtime = attack != Provenance::kPgdOffline;
      r.feasible = attack == Provenance::kPgdOffline ? false : outcome.realtime_feasible;
      r.covered_s = outcome.covered_seconds;
      rows.push_back(r);
    }
  }
  return rows;
}

nlohmann::json Curve::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points)
    pts.push_back({{"x", p.x}, {"y", p.y}, {"y_scaled", p.y_scaled}, {"cer", p.cer},
                   {"y_lo", p.y_lo}, {"y_hi", p.y_hi}, {"covered_s", p.covered_s}});
  return {{"name", name}, {"x_label", x_label}, {"clean_wer", clean_wer}, {"points", pts}};
}

Curve delay_sweep(PredictorModel& predictor, AsrBackend& target, const Dataset& data, const AttackSettings& s,
                  const std::vector<double>& deltas) {
  Curve c;
  c.name = "delay";
  c.x_label = "delta_s";
  c.clean_wer = score_clean(target, data, s.batch_size).wer;
  auto base = run_attack(Provenance::kPredictive, target, &predictor, data, s);
  const double ref_cover = base.covered_seconds;
  for (double d : deltas) {
    std::vector<Waveform> audio;
    double cover = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      auto p = shift_plan(base.plans[i], d);
      cover += p.covered_seconds();
      audio.push_back(apply_plan(data[i].audio, p));
    }
    auto sc = score_audio(target, data, audio, s.batch_size);
    CurvePoint pt;
    pt.x = d;
    pt.y = sc.wer;
    pt.cer = sc.cer;
    pt.covered_s = cover;
    pt.y_scaled = cover > 0 ? coverage_scaled_error(sc.wer, c.clean_wer, ref_cover, cover) : sc.wer;
    pt.y_lo = pt.y_hi = pt.y;
    c.points.push_back(pt);
  }
  return c;
}

Curve delay_sweep_retrained(AsrBackend& target, const Dataset& train, const Dataset& test, const TrainConfig& base,
                            const PredictorArchitecture& arch, const std::vector<double>& deltas,
                            const AttackSettings& s) {
  Curve c;
  c.name = "delay_retrained";
  c.x_label = "delta_s";
  c.clean_wer = score_clean(target, test, s.batch_size).wer;
  for (double d : deltas) {
    auto cfg = base;
    cfg.clock.delay = d;
    auto pred = make_predictor(arch, cfg.seed);
    train_predictor(pred, target, train, {}, cfg);
    auto settings = s;
    settings.clock.delay = d;
    auto out = run_attack(Provenance::kPredictive, target, &pred, test, settings);
    auto sc = score_audio(target, test, out.attacked, s.batch_size);
    CurvePoint pt;
    pt.x = d;
    pt.y = pt.y_scaled = pt.y_lo = pt.y_hi = sc.wer;
    pt.cer = sc.cer;
    pt.covered_s = out.covered_seconds;
    c.points.push_back(pt);
  }
  return c;
}

Curve amplitude_sweep(AsrBackend& target, const Dataset& train, const Dataset& test, const TrainConfig& base,
                      const PredictorArchitecture& arch, const std::vector<double>& multipliers,
                      const std::vector<std::uint64_t>& seeds, const AttackSettings& s) {
  if (seeds.empty()) throw DomainError("amplitude_sweep: need at least one seed");
  Curve c;
  c.name = "amplitude";
  c.x_label = "m";
  const auto clean = score_clean(target, test, s.batch_size);
  c.clean_wer = clean.wer;
  for (double m : multipliers) {
    std::vector<double> wers, cers;
    for (auto seed : seeds) {
      if (m == 0.0) {
        wers.push_back(clean.wer);
        cers.push_back(clean.cer);
        continue;
      }
      auto cfg = base;
      cfg.multiplier = m;
      cfg.seed = seed;
      auto pred = make_predictor(arch, seed);
      train_predictor(pred, target, train, {}, cfg);
      auto settings = s;
      settings.multiplier = m;
      auto out = run_attack(Provenance::kPredictive, target, &pred, test, settings);
      auto sc = score_audio(target, test, out.attacked, s.batch_size);
      wers.push_back(sc.wer);
      cers.push_back(sc.cer);
    }
    CurvePoint pt;
    pt.x = m;
    pt.y = pt.y_scaled = std::accumulate(wers.begin(), wers.end(), 0.0) / static_cast<double>(wers.size());
    pt.cer = std::accumulate(cers.begin(), cers.end(), 0.0) / static_cast<double>(cers.size());
    pt.y_lo = *std::min_element(wers.begin(), wers.end());
    pt.y_hi = *std::max_element(wers.begin(), wers.end());
    c.points.push_back(pt);
  }
  return c;
}

nlohmann::json SwapResult::to_json() const {
  return {{"clean_wer", clean_wer},     {"clean_cer", clean_cer},     {"matched_wer", matched_wer},
          {"matched_cer", matched_cer}, {"swapped_wer", swapped_wer}, {"swapped_cer", swapped_cer},
          {"permutation", permutation}};
}

SwapResult swap_experiment(PredictorModel& predictor, AsrBackend& target, const Dataset& data,
                           const AttackSettings& s) {
  if (data.size() < 2) throw DomainError("swap_experiment: need at least two utterances");
  SwapResult r;
  const auto clean = score_clean(target, data, s.batch_size);
  r.clean_wer = clean.wer;
  r.clean_cer = clean.cer;
  auto matched = run_attack(Provenance::kPredictive, target, &predictor, data, s);
  auto m = score_audio(target, data, matched.attacked, s.batch_size);
  r.matched_wer = m.wer;
  r.matched_cer = m.cer;
  r.permutation = random_derangement(data.size(), derive_seed(s.seed, "swap"));
  const auto swapped = swap_attacks(matched.plans, r.permutation);
  std::vector<Waveform> audio;
  for (std::size_t i = 0; i < data.size(); ++i) audio.push_back(apply_plan(data[i].audio, swapped[i]));
  auto w = score_audio(target, data, audio, s.batch_size);
  r.swapped_wer = w.wer;
  r.swapped_cer = w.cer;
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) return 0.0;
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0 || sbb <= 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

nlohmann::json WordAnalysis::to_json() const {
  auto rows = [](const std::vector<WordStats>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& w : v)
      a.push_back({{"word", w.word}, {"count", w.count}, {"length", w.length}, {"clean_acc", w.clean_accuracy},
                   {"attacked_acc", w.attacked_accuracy}, {"drop", w.drop()}});
    return a;
  };
  return {{"words", rows(words)},
          {"easiest", rows(easiest)},
          {"hardest", rows(hardest)},
          {"length_drop_correlation", length_drop_correlation},
          {"count_drop_correlation", count_drop_correlation}};
}

WordAnalysis per_word_analysis(const std::vector<std::string>& refs, const std::vector<std::string>& clean_hyps,
                               const std::vector<std::string>& attacked_hyps, std::size_t top_n) {
  if (refs.size() != clean_hyps.size() || refs.size() != attacked_hyps.size())
    throw DomainError("per_word_analysis: mismatched result lists");
  struct Acc {
    int count = 0, clean = 0, attacked = 0;
  };
  std::map<std::string, Acc> acc;
  auto correct = [](const std::string& ref, const std::string& hyp) {
    const auto a = align_words(ref, hyp);
    std::vector<bool> ok(split_words(normalize_text(ref)).size(), false);
    for (const auto& p : a.pairs)
      if (p.op == EditOp::kMatch) ok[static_cast<std::size_t>(p.ref_index)] = true;
    return ok;
  };
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const auto words = split_words(normalize_text(refs[i]));
    const auto c = correct(refs[i], clean_hyps[i]);
    const auto a = correct(refs[i], attacked_hyps[i]);
    for (std::size_t k = 0; k < words.size(); ++k) {
      auto& e = acc[words[k]];
      e.count++;
      e.clean += c[k];
      e.attacked += a[k];
    }
  }
  WordAnalysis out;
  std::vector<double> len, cnt, drop;
  for (const auto& [w, e] : acc) {
    WordStats s;
    s.word = w;
    s.count = e.count;
    s.length = static_cast<int>(w.size());
    s.clean_accuracy = static_cast<double>(e.clean) / e.count;
    s.attacked_accuracy = static_cast<double>(e.attacked) / e.count;
    out.words.push_back(s);
    len.push_back(s.length);
    cnt.push_back(s.count);
    drop.push_back(s.drop());
  }
  out.length_drop_correlation = pearson(len, drop);
  out.count_drop_correlation = pearson(cnt, drop);
  auto sorted = out.words;
  std::stable_sort(sorted.begin(), sorted.end(), [](const WordStats& a, const WordStats& b) { return a.drop() > b.drop(); });
  out.easiest.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(std::min(top_n, sorted.size())));
  std::stable_sort(sorted.begin(), sorted.end(), [](const WordStats& a, const WordStats& b) { return a.drop() < b.drop(); });
  out.hardest.assign(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(std::min(top_n, sorted.size())));
  return out;
}

}  // namespace camo
