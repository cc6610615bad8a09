// src/cli/app.cpp

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

#include "camo/cli/app.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <torch/torch.h>

#include "camo/asr/backend.hpp"
#include "camo/asr/train.hpp"
#include "camo/attack/pgd.hpp"
#include "camo/audio/wav_io.hpp"
#include "camo/cli/config.hpp"
#include "camo/core/digest.hpp"
#include "camo/core/error.hpp"
#include "camo/core/rng.hpp"
#include "camo/data/ingest.hpp"
#include "camo/data/synth.hpp"
#include "camo/defense/denoiser.hpp"
#include "camo/defense/training.hpp"
#include "camo/eval/experiments.hpp"
#include "camo/eval/report.hpp"
#include "camo/predictor/predictor.hpp"

namespace camo {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Context {
  RunConfig cfg;
  RunDir dir{"."};
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  std::string command;

  void log(const json& j) const {
    std::ofstream os(dir.logs() / (command + ".jsonl"), std::ios::app);
    os << j.dump() << '\n';
    *out << j.dump() << std::endl;
  }
  void warn(const std::string& msg) const { *err << "warning: " << msg << std::endl; }
};

template <class F>
auto validated(const char* what, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  } catch (const json::exception& e) {
    throw UsageError(std::string(what) + ": " + e.what());
  }
}

void check_environment() {
  if (const char* dev = std::getenv("CAMO_DEVICE")) {
    const std::string d = dev;
    if (!d.empty() && d != "cpu")
      throw UsageError("CAMO_DEVICE=" + d + ": only 'cpu' is supported by this build");
  }
  if (const char* th = std::getenv("CAMO_THREADS")) {
    int n = 0;
    try {
      n = std::stoi(th);
    } catch (const std::exception&) {
    }
    if (n <= 0) throw UsageError(std::string("CAMO_THREADS=") + th + ": expected a positive integer");
    torch::set_num_threads(n);
  }
}

// ---------------------------------------------------------------- data

fs::path manifest_path(const Context& c) {
  const auto m = c.cfg.at("data.manifest").get<std::string>();
  return m.empty() ? c.dir.root / "data" / "manifest.jsonl" : fs::path(m);
}

Dataset load_split(const Context& c, const std::string& split, int max_items) {
  const auto path = manifest_path(c);
  if (!fs::exists(path)) throw UsageError("manifest not found: " + path.string() + " (run 'camo ingest' first)");
  LoadReport rep;
  auto data = load_dataset(read_manifest(path), path.parent_path(), split, &rep);
  for (const auto& w : rep.warnings) c.warn(w);
  if (max_items > 0 && static_cast<int>(data.size()) > max_items) data.resize(max_items);
  if (data.empty()) throw UsageError("manifest " + path.string() + " has no usable '" + split + "' records");
  return data;
}

Dataset train_split(const Context& c) {
  return load_split(c, c.cfg.at("data.train_split").get<std::string>(), c.cfg.at("data.max_train").get<int>());
}

Dataset test_split(const Context& c) {
  return load_split(c, c.cfg.at("data.test_split").get<std::string>(), c.cfg.at("data.max_test").get<int>());
}

// Last fraction of `train` becomes the held-out monitor set.
std::pair<Dataset, Dataset> carve_heldout(Dataset train, double fraction) {
  const auto n = train.size();
  std::size_t h = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
  if (n >= 2) h = std::clamp<std::size_t>(h, 1, n - 1);
  else h = 0;
  Dataset held(train.end() - static_cast<std::ptrdiff_t>(h), train.end());
  train.resize(n - h);
  if (held.empty()) held = train;
  return {std::move(train), std::move(held)};
}

// ---------------------------------------------------------------- models

fs::path asr_path(const Context& c, bool robust) {
  return c.dir.checkpoints() / (robust ? "asr_robust.camo" : "asr.camo");
}

fs::path predictor_path(const Context& c, const std::string& defense) {
  return c.dir.checkpoints() / (defense == "none" ? "predictor.camo" : "predictor_" + defense + ".camo");
}

AsrModel require_asr(const Context& c, bool robust) {
  const auto p = asr_path(c, robust);
  if (!fs::exists(p))
    throw UsageError("checkpoint not found: " + p.string() + (robust ? " (run 'camo advtrain')" : " (run 'camo train-asr')"));
  return load_asr(p);
}

std::shared_ptr<ReferenceAsr> make_reference(const Context& c, AsrModel model, const std::string& name,
                                             bool force_lm = false) {
  auto asr = std::make_shared<ReferenceAsr>(std::move(model), name);
  const auto decoder = force_lm ? std::string("beam") : c.cfg.at("asr.decoder").get<std::string>();
  if (decoder == "beam") {
    const auto p = c.dir.checkpoints() / "lm.json";
    if (!fs::exists(p)) throw UsageError("language model not found: " + p.string());
    std::ifstream is(p);
    auto lm = std::make_shared<CharNgramLm>(CharNgramLm::from_json(json::parse(is)));
    BeamOptions o;
    o.beam_width = c.cfg.at("asr.lm.beam_width").get<int>();
    o.lm_weight = c.cfg.at("asr.lm.weight").get<double>();
    o.word_bonus = c.cfg.at("asr.lm.word_bonus").get<double>();
    asr->set_language_model(std::move(lm), o);
  } else if (decoder != "greedy") {
    throw UsageError("asr.decoder must be 'greedy' or 'beam', got '" + decoder + "'");
  }
  return asr;
}

void check_defense(const std::string& d) {
  if (d != "none" && d != "denoiser" && d != "advtrain" && d != "lm")
    throw UsageError("unknown defense '" + d + "' (expected none, denoiser, advtrain or lm)");
}

std::shared_ptr<const Denoiser> make_denoiser(const Context& c) {
  const auto opts = validated("denoiser", [&] { return SpectralGateOptions::from_json(c.cfg.at("denoiser")); });
  return std::make_shared<SpectralGateDenoiser>(opts);
}

std::shared_ptr<AsrBackend> make_target(const Context& c, const std::string& defense) {
  check_defense(defense);
  if (defense == "advtrain") return make_reference(c, require_asr(c, true), "advtrain");
  if (defense == "lm") return make_reference(c, require_asr(c, false), "lm", true);
  auto base = make_reference(c, require_asr(c, false), "none");
  if (defense == "denoiser") return std::make_shared<DenoisedAsr>(base, make_denoiser(c));
  return base;
}

StreamClock clock_from(const Context& c) {
  StreamClock k;
  k.delay = c.cfg.at("attack.delta").get<double>();
  k.chunk = c.cfg.at("attack.r").get<double>();
  k.context = c.cfg.at("attack.context").get<double>();
  validated("attack clock", [&] {
    k.validate();
    return 0;
  });
  return k;
}

AttackSettings settings_from(const Context& c) {
  json j;
  j["m"] = c.cfg.at("attack.m");
  j["clock"] = clock_from(c).to_json();
  j["pgd"] = {{"steps", c.cfg.at("attack.pgd.steps")},
              {"step_fraction", c.cfg.at("attack.pgd.step_fraction")},
              {"m", c.cfg.at("attack.m")}};
  j["pgd_steps_denoised"] = c.cfg.at("attack.pgd.steps_denoised");
  j["seed"] = derive_seed(c.cfg.seed(), "attack");
  j["epsilon_binding"] = c.cfg.at("attack.epsilon_binding");
  auto s = validated("attack settings", [&] { return AttackSettings::from_json(j); });
  if (s.multiplier < 0) throw UsageError("attack.m must be non-negative");
  validated("attack.pgd", [&] {
    s.pgd.validate();
    return 0;
  });
  return s;
}

TrainConfig predictor_train_from(const Context& c) {
  json j = c.cfg.at("predictor.train");
  j["seed"] = derive_seed(c.cfg.seed(), "predictor-train");
  j["m"] = c.cfg.at("attack.m");
  j["clock"] = clock_from(c).to_json();
  return validated("predictor.train", [&] {
    auto t = TrainConfig::from_json(j);
    t.validate();
    return t;
  });
}

PredictorArchitecture predictor_arch_from(const Context& c) {
  return validated("predictor.architecture", [&] {
    auto a = PredictorArchitecture::from_json(c.cfg.at("predictor.architecture"));
    a.validate();
    return a;
  });
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      v.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("not a number: '" + item + "'");
    }
  }
  if (v.empty()) throw UsageError("empty value list");
  return v;
}

json provenance(const Context& c) {
  return {{"command", c.command}, {"config_digest", c.cfg.digest()}, {"seed", c.cfg.seed()}, {"config", c.cfg.json()}};
}

// ---------------------------------------------------------------- commands

struct IngestArgs {
  std::string source;
  std::string layout = "flat";
  std::string split = "train";
  int synthetic = 0;
};

int cmd_ingest(Context& c, const IngestArgs& a) {
  if (a.synthetic <= 0 && a.source.empty()) throw UsageError("ingest needs --source DIR or --synthetic N");
  const auto manifest = manifest_path(c);
  std::vector<ManifestRecord> records;
  if (a.synthetic > 0) {
    SynthConfig sc;
    const auto& s = c.cfg.at("synth");
    sc.seed = derive_seed(c.cfg.seed(), "synth");
    sc.num_utterances = a.synthetic;
    sc.num_speakers = s.at("num_speakers").get<int>();
    sc.min_duration = s.at("min_duration").get<double>();
    sc.max_duration = s.at("max_duration").get<double>();
    sc.noise_min = s.at("noise_min").get<double>();
    sc.noise_max = s.at("noise_max").get<double>();
    sc.formant_spread = s.at("formant_spread").get<double>();
    sc.rate_spread = s.at("rate_spread").get<double>();
    const double tf = s.at("test_fraction").get<double>();
    if (tf < 0 || tf >= 1) throw UsageError("synth.test_fraction must be in [0, 1)");
    auto data = synthesize_corpus(sc);
    const auto n_test = static_cast<std::size_t>(std::round(tf * static_cast<double>(data.size())));
    Dataset test(data.end() - static_cast<std::ptrdiff_t>(n_test), data.end());
    data.resize(data.size() - n_test);
    const auto audio_dir = manifest.parent_path() / "audio";
    auto tr = export_dataset(data, audio_dir, c.cfg.at("data.train_split").get<std::string>());
    auto te = export_dataset(test, audio_dir, c.cfg.at("data.test_split").get<std::string>());
    for (auto* part : {&tr, &te})
      for (auto& r : *part) {
        r.audio_path = (fs::path("audio") / r.audio_path).string();
        records.push_back(r);
      }
    c.log({{"event", "synthesized"}, {"train", tr.size()}, {"test", te.size()}});
  } else {
    if (!fs::is_directory(a.source)) throw UsageError("source directory not found: " + a.source);
    const auto layout = validated("--layout", [&] { return parse_layout(a.layout); });
    auto res = ingest_corpus(a.source, layout, a.split);
    for (const auto& w : res.warnings) c.warn(w);
    if (fs::exists(manifest))
      for (auto& r : read_manifest(manifest))
        if (r.split != a.split) records.push_back(r);
    for (auto& r : res.records) records.push_back(r);
    c.log({{"event", "ingested"}, {"split", a.split}, {"records", res.records.size()}, {"skipped", res.skipped}});
  }
  fs::create_directories(manifest.parent_path());
  write_manifest(manifest, records);
  *c.out << "manifest: " << manifest.string() << " (" << records.size() << " records)" << std::endl;
  return kExitOk;
}

int cmd_train_asr(Context& c) {
  auto [train, held] = carve_heldout(train_split(c), c.cfg.at("data.heldout_fraction").get<double>());
  auto arch = validated("asr.architecture", [&] { return AsrArchitecture::from_json(c.cfg.at("asr.architecture")); });
  json tj = c.cfg.at("asr.train");
  tj["seed"] = derive_seed(c.cfg.seed(), "asr-train");
  const auto tcfg = validated("asr.train", [&] { return AsrTrainConfig::from_json(tj); });
  auto model = make_asr(arch, c.cfg.seed());
  auto rep = train_asr(model, train, held, tcfg, [&](const EpochLog& l) { c.log(l.to_json()); });
  if (rep.best_epoch > 0 && rep.best_epoch != tcfg.epochs)
    c.log({{"event", "kept_best_epoch"}, {"epoch", rep.best_epoch}});
  if (rep.skipped > 0) c.warn(std::to_string(rep.skipped) + " training utterances cannot be aligned and were skipped");
  model->metadata.epochs = tcfg.epochs;
  model->metadata.corpus_id = sha256_hex(manifest_path(c).string()).substr(0, 16);
  save_asr(asr_path(c, false), model);

  CharNgramLm lm(c.cfg.at("asr.lm.order").get<int>());
  std::vector<std::string> sentences;
  for (const auto& u : train) sentences.push_back(u.transcript);
  lm.train(sentences);
  std::ofstream(c.dir.checkpoints() / "lm.json") << lm.to_json().dump() << '\n';
  *c.out << "saved " << asr_path(c, false).string() << std::endl;
  return kExitOk;
}

int cmd_train_predictor(Context& c, std::string defense) {
  if (defense.empty()) defense = c.cfg.at("defense").get<std::string>();
  check_defense(defense);
  auto [train, held] = carve_heldout(train_split(c), c.cfg.at("data.heldout_fraction").get<double>());
  auto target = make_target(c, defense);
  const auto tcfg = predictor_train_from(c);
  auto on_epoch = [&](const EpochLog& l) {
    auto j = l.to_json();
    j["defense"] = defense;
    c.log(j);
  };
  PredictorModel model{nullptr};
  const auto base_path = predictor_path(c, "none");
  if (defense != "none" && fs::exists(base_path)) {
    auto base = load_predictor(base_path);
    model = retrain_predictor_for(*target, base, train, held, tcfg, on_epoch);
  } else {
    if (defense != "none") c.warn("no base predictor at " + base_path.string() + "; training from scratch");
    model = make_predictor(predictor_arch_from(c), derive_seed(c.cfg.seed(), "predictor-init"));
    train_predictor(model, *target, train, held, tcfg, on_epoch);
  }
  model->metadata["defense"] = defense;
  model->metadata["m"] = tcfg.multiplier;
  model->metadata["clock"] = tcfg.clock.to_json();
  model->metadata["config_digest"] = c.cfg.digest();
  save_predictor(predictor_path(c, defense), model);
  *c.out << "saved " << predictor_path(c, defense).string() << std::endl;
  return kExitOk;
}

int cmd_advtrain(Context& c) {
  auto [train, held] = carve_heldout(train_split(c), c.cfg.at("data.heldout_fraction").get<double>());
  json j = c.cfg.at("advtrain");
  j["seed"] = derive_seed(c.cfg.seed(), "advtrain");
  j["m"] = c.cfg.at("attack.m");
  const auto acfg = validated("advtrain", [&] {
    auto a = AdvTrainConfig::from_json(j);
    a.validate();
    return a;
  });
  auto base = require_asr(c, false);
  auto model = clone_asr(base);
  auto rep = adversarial_train_asr(model, train, held, acfg, [&](const AdvEpochLog& l) { c.log(l.to_json()); });
  c.log({{"event", "stopped"}, {"reason", rep.stop_reason}, {"epochs", rep.epochs.size()}});
  model->metadata.note = "adversarially trained: " + rep.stop_reason;
  save_asr(asr_path(c, true), model);
  *c.out << "saved " << asr_path(c, true).string() << std::endl;
  return kExitOk;
}

std::vector<DefenseSetup> defense_setups(const Context& c, const std::vector<std::string>& names, bool need_predictor) {
  std::vector<DefenseSetup> out;
  for (const auto& d : names) {
    DefenseSetup s;
    s.name = d;
    s.target = make_target(c, d);
    s.denoiser_in_loop = d == "denoiser";
    if (need_predictor) {
      auto p = predictor_path(c, d);
      if (!fs::exists(p) && d != "none") {
        c.warn("no predictor trained against '" + d + "'; using the undefended one");
        p = predictor_path(c, "none");
      }
      if (fs::exists(p)) s.predictor = load_predictor(p);
      else c.warn("predictor not found: " + p.string() + "; predictive cells skipped");
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct EvaluateArgs {
  std::vector<std::string> attacks;
  std::vector<std::string> defenses;
  std::optional<double> multiplier;
  std::optional<double> delay;
  std::string sweep;
  std::string name = "evaluate";
  bool per_word = false;
  bool swap = false;
};

void apply_overrides(Context& c, const std::optional<double>& multiplier, const std::optional<double>& delay) {
  if (multiplier) c.cfg.set_json("attack.m", *multiplier);
  if (delay) c.cfg.set_json("attack.delta", *delay);
}

int cmd_evaluate(Context& c, const EvaluateArgs& a) {
  auto attacks = a.attacks.empty() ? c.cfg.at("evaluate.attacks").get<std::vector<std::string>>() : a.attacks;
  auto defenses = a.defenses.empty() ? c.cfg.at("evaluate.defenses").get<std::vector<std::string>>() : a.defenses;
  for (const auto& d : defenses) check_defense(d);
  GridConfig g;
  g.settings = settings_from(c);
  g.attacks.clear();
  for (const auto& s : attacks) g.attacks.push_back(validated("--attack", [&] { return parse_provenance(s); }));
  g.timing_runs = c.cfg.at("evaluate.timing_runs").get<int>();
  g.timing_warmup = c.cfg.at("evaluate.timing_warmup").get<int>();

  std::vector<double> sweep_deltas;
  if (!a.sweep.empty()) {
    const auto eq = a.sweep.find('=');
    if (eq == std::string::npos || a.sweep.substr(0, eq) != "delay")
      throw UsageError("--sweep expects delay=v1,v2,...");
    sweep_deltas = parse_list(a.sweep.substr(eq + 1));
  }
  const bool per_word = a.per_word || c.cfg.at("evaluate.per_word").get<bool>();
  const bool swap = a.swap || c.cfg.at("evaluate.swap").get<bool>();
  const bool need_pred = std::count(g.attacks.begin(), g.attacks.end(), Provenance::kPredictive) > 0 ||
                         !sweep_deltas.empty() || per_word || swap;

  auto test = test_split(c);
  auto setups = defense_setups(c, defenses, need_pred);
  EvalReport report;
  report.provenance = provenance(c);
  report.rows = evaluate_grid(setups, test, g);
  for (const auto& r : report.rows) c.log(r.to_json());

  auto& base = setups.front();
  if (base.predictor) {
    if (!sweep_deltas.empty()) {
      if (c.cfg.at("sweep.retrain").get<bool>()) {
        auto train = train_split(c);
        report.curves.push_back(delay_sweep_retrained(*base.target, train, test, predictor_train_from(c),
                                                      predictor_arch_from(c), sweep_deltas, g.settings));
      } else {
        report.curves.push_back(delay_sweep(base.predictor, *base.target, test, g.settings, sweep_deltas));
      }
    }
    if (per_word) {
      auto clean = score_clean(*base.target, test);
      auto att = run_attack(Provenance::kPredictive, *base.target, &base.predictor, test, g.settings,
                            base.denoiser_in_loop);
      auto scored = score_audio(*base.target, test, att.attacked);
      std::vector<std::string> refs;
      for (const auto& u : test) refs.push_back(u.transcript);
      report.words = per_word_analysis(refs, clean.hyps, scored.hyps);
    }
    if (swap) report.swap = swap_experiment(base.predictor, *base.target, test, g.settings);
  } else if (!sweep_deltas.empty() || per_word || swap) {
    c.warn("sweeps, per-word analysis and swap need a trained predictor; skipped");
  }
  const auto path = write_report(c.dir.reports() / a.name, report);
  *c.out << render_table(report.to_json()) << "report: " << path.string() << std::endl;
  return kExitOk;
}

struct SweepArgs {
  std::string kind;
  std::string values;
  std::string seeds;
  bool retrain = false;
  std::string defense = "none";
};

int cmd_sweep(Context& c, const SweepArgs& a) {
  const auto kind = a.kind.empty() ? c.cfg.at("sweep.kind").get<std::string>() : a.kind;
  const auto values = a.values.empty() ? c.cfg.at("sweep.values").get<std::vector<double>>() : parse_list(a.values);
  const bool retrain = a.retrain || c.cfg.at("sweep.retrain").get<bool>();
  auto settings = settings_from(c);
  auto test = test_split(c);
  auto target = make_target(c, a.defense);
  EvalReport report;
  report.provenance = provenance(c);
  if (kind == "delay") {
    for (double d : values)
      if (d < 0) throw UsageError("delays must be non-negative");
    if (retrain) {
      auto train = train_split(c);
      report.curves.push_back(delay_sweep_retrained(*target, train, test, predictor_train_from(c),
                                                    predictor_arch_from(c), values, settings));
    } else {
      const auto p = predictor_path(c, a.defense);
      if (!fs::exists(p)) throw UsageError("predictor not found: " + p.string() + " (run 'camo train-predictor')");
      auto pred = load_predictor(p);
      report.curves.push_back(delay_sweep(pred, *target, test, settings, values));
    }
  } else if (kind == "amplitude") {
    for (double m : values)
      if (m < 0) throw UsageError("multipliers must be non-negative");
    std::vector<std::uint64_t> seeds;
    if (a.seeds.empty()) seeds = c.cfg.at("sweep.seeds").get<std::vector<std::uint64_t>>();
    else
      for (double s : parse_list(a.seeds)) seeds.push_back(static_cast<std::uint64_t>(s));
    auto train = train_split(c);
    report.curves.push_back(amplitude_sweep(*target, train, test, predictor_train_from(c), predictor_arch_from(c),
                                            values, seeds, settings));
  } else {
    throw UsageError("sweep kind must be 'delay' or 'amplitude', got '" + kind + "'");
  }
  for (const auto& p : report.curves.back().points)
    c.log({{"x", p.x}, {"wer", p.y}, {"wer_scaled", p.y_scaled}, {"cer", p.cer}, {"lo", p.y_lo}, {"hi", p.y_hi}});
  const auto path = write_report(c.dir.reports() / ("sweep_" + kind), report);
  *c.out << render_table(report.to_json()) << "report: " << path.string() << std::endl;
  return kExitOk;
}

struct AttackFileArgs {
  std::string input;
  std::string out_dir;
  std::string attack;
  std::string defense = "none";
  std::optional<double> multiplier;
  std::optional<double> delay;
};

int cmd_attack_file(Context& c, const AttackFileArgs& a) {
  if (!fs::exists(a.input)) throw UsageError("input not found: " + a.input);
  apply_overrides(c, a.multiplier, a.delay);
  const auto kind_name = a.attack.empty() ? c.cfg.at("attack.kind").get<std::string>() : a.attack;
  const auto kind = validated("--attack", [&] { return parse_provenance(kind_name); });
  if (kind == Provenance::kPgdOffline || kind == Provenance::kNone)
    throw UsageError("attack-file streams chunks; use uniform, pgd-online or predictive");
  auto s = settings_from(c);
  auto w = read_wav(a.input);
  if (w.sample_rate != kSampleRate) w = resample(w, kSampleRate);
  const fs::path out_dir = a.out_dir.empty() ? c.dir.reports() / "attack-file" : fs::path(a.out_dir);
  const auto stem = fs::path(a.input).stem().string();

  std::shared_ptr<AsrBackend> target;
  std::unique_ptr<ChunkGenerator> gen;
  if (kind == Provenance::kUniform) {
    gen = std::make_unique<UniformNoiseGenerator>(s.seed);
  } else if (kind == Provenance::kPgdOnline) {
    target = make_target(c, a.defense);
    gen = std::make_unique<OnlinePgdGenerator>(*target, s.pgd);
  } else {
    const auto p = predictor_path(c, a.defense);
    if (!fs::exists(p)) throw UsageError("predictor not found: " + p.string() + " (run 'camo train-predictor')");
    gen = std::make_unique<PredictiveGenerator>(load_predictor(p));
  }
  auto r = schedule_stream(w, *gen, s.clock, s.multiplier, s.binding);
  if (r.plan.chunks.empty())
    c.warn("stream of " + std::to_string(static_cast<double>(w.samples.size()) / kSampleRate) +
           " s is shorter than context + delay (" + std::to_string(s.clock.context + s.clock.delay) +
           " s); empty plan");
  std::ostream& o = *c.out;
  o << std::fixed << std::setprecision(3);
  for (std::size_t k = 0; k < r.plan.chunks.size(); ++k) {
    const auto& ch = r.plan.chunks[k];
    o << "chunk " << k << " start " << static_cast<double>(ch.start) / kSampleRate << " s  latency "
      << 1000.0 * ch.latency << " ms  eps " << ch.perturbation.budget.epsilon << '\n';
  }
  o << "max latency " << 1000.0 * r.plan.max_latency() << " ms, delay " << 1000.0 * s.clock.delay << " ms: "
    << (r.plan.realtime_feasible() ? "real-time feasible" : "NOT real-time feasible") << '\n';
  o.unsetf(std::ios::floatfield);
  write_plan(out_dir, stem, r.plan);
  write_wav(out_dir / (stem + "_attacked.wav"), r.attacked);
  o << "plan: " << (out_dir / (stem + ".json")).string() << std::endl;
  return kExitOk;
}

int cmd_report(Context& c, const std::string& input) {
  std::vector<fs::path> files;
  if (!input.empty()) {
    fs::path p = input;
    if (fs::is_directory(p)) p /= "report.json";
    if (!fs::exists(p)) throw UsageError("report not found: " + p.string());
    files.push_back(p);
  } else if (fs::is_directory(c.dir.reports())) {
    for (const auto& e : fs::directory_iterator(c.dir.reports()))
      if (fs::exists(e.path() / "report.json")) files.push_back(e.path() / "report.json");
    std::sort(files.begin(), files.end());
  }
  if (files.empty()) throw UsageError("no reports under " + c.dir.reports().string());
  for (const auto& f : files) {
    std::ifstream is(f);
    json j;
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw FormatError("report " + f.string() + ": " + e.what());
    }
    *c.out << "== " << f.parent_path().filename().string() << '\n' << render_table(j);
  }
  *c.out << std::flush;
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"camo: real-time predictive speech-recognition attacks", "camo"};
  app.require_subcommand(1);
  std::string config_file, run_dir;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_file, "JSON config file");
  app.add_option("--set", sets, "override a config key, key=value (repeatable)");
  app.add_option("--run-dir", run_dir, "run directory (overrides output_dir)");
  app.add_option("--seed", seed, "root seed");
  app.fallthrough();

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "build a manifest from a corpus directory or a synthetic corpus");
  c_ingest->add_option("--source", ingest.source, "corpus directory");
  c_ingest->add_option("--layout", ingest.layout, "flat or librispeech");
  c_ingest->add_option("--split", ingest.split, "split name for --source");
  c_ingest->add_option("--synthetic", ingest.synthetic, "synthesize N utterances instead");

  app.add_subcommand("train-asr", "train the reference recognizer and its language model");

  std::string pred_defense;
  auto* c_pred = app.add_subcommand("train-predictor", "train the predictive attack network");
  c_pred->add_option("--defense", pred_defense, "train against none, denoiser, advtrain or lm");

  app.add_subcommand("advtrain", "adversarially fine-tune the recognizer");

  EvaluateArgs ev;
  auto* c_eval = app.add_subcommand("evaluate", "attack x defense grid on the test split");
  c_eval->add_option("--attack", ev.attacks, "attacks (none, uniform, pgd-online, predictive, pgd-offline)");
  c_eval->add_option("--defense", ev.defenses, "defenses (none, denoiser, advtrain, lm)");
  c_eval->add_option("--multiplier", ev.multiplier, "amplitude multiplier m");
  c_eval->add_option("--delay", ev.delay, "delay in seconds");
  c_eval->add_option("--sweep", ev.sweep, "delay=v1,v2,...");
  c_eval->add_option("--name", ev.name, "report name");
  c_eval->add_flag("--per-word", ev.per_word, "per-word accuracy analysis");
  c_eval->add_flag("--swap", ev.swap, "context swap experiment");

  AttackFileArgs af;
  auto* c_af = app.add_subcommand("attack-file", "stream-attack one WAV file");
  c_af->add_option("input", af.input, "input WAV")->required();
  c_af->add_option("--out", af.out_dir, "output directory");
  c_af->add_option("--attack", af.attack, "uniform, pgd-online or predictive");
  c_af->add_option("--defense", af.defense, "pipeline the attack targets");
  c_af->add_option("--multiplier", af.multiplier, "amplitude multiplier m");
  c_af->add_option("--delay", af.delay, "delay in seconds");

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "delay or amplitude sweep");
  c_sweep->add_option("--kind", sw.kind, "delay or amplitude");
  c_sweep->add_option("--values", sw.values, "comma-separated values");
  c_sweep->add_option("--seeds", sw.seeds, "comma-separated seeds (amplitude)");
  c_sweep->add_flag("--retrain", sw.retrain, "retrain a predictor per delay");
  c_sweep->add_option("--defense", sw.defense, "pipeline under attack");
  std::optional<double> sweep_m, sweep_delay;
  c_sweep->add_option("--multiplier", sweep_m, "amplitude multiplier m");
  c_sweep->add_option("--delay", sweep_delay, "delay the plans are computed at");

  std::string report_input;
  auto* c_report = app.add_subcommand("report", "print report tables");
  c_report->add_option("--input", report_input, "report.json or its directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Context c;
  c.out = &out;
  c.err = &err;
  try {
    check_environment();
    c.cfg = RunConfig::load(config_file.empty() ? std::nullopt : std::optional<fs::path>(config_file));
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
      c.cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) c.cfg.set_json("seed", *seed);
    if (!run_dir.empty()) c.cfg.set_json("output_dir", run_dir);
    c.dir = RunDir(c.cfg.output_dir());
    auto* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    if (sub == c_sweep) apply_overrides(c, sweep_m, sweep_delay);
    if (sub == c_eval) apply_overrides(c, ev.multiplier, ev.delay);
    c.dir.freeze(c.cfg, c.command);
    torch::manual_seed(derive_seed(c.cfg.seed(), c.command));

    if (sub == c_ingest) return cmd_ingest(c, ingest);
    if (c.command == "train-asr") return cmd_train_asr(c);
    if (sub == c_pred) return cmd_train_predictor(c, pred_defense);
    if (c.command == "advtrain") return cmd_advtrain(c);
    if (sub == c_eval) return cmd_evaluate(c, ev);
    if (sub == c_af) return cmd_attack_file(c, af);
    if (sub == c_sweep) return cmd_sweep(c, sw);
    if (sub == c_report) return cmd_report(c, report_input);
    throw UsageError("unknown command");
  } catch (const UsageError& e) {
    err << "error: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const nlohmann::json::type_error& e) {
    err << "error: config value has the wrong type: " << e.what() << std::endl;
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << std::endl;
    return kExitRuntime;
  }
}

}  // namespace camo
