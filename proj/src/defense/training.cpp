// src/defense/training.cpp

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

#include "camo/defense/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <torch/torch.h>

#include "camo/asr/alphabet.hpp"
#include "camo/asr/ctc.hpp"
#include "camo/attack/pgd.hpp"
#include "camo/core/error.hpp"
#include "camo/core/rng.hpp"
#include "camo/eval/metrics.hpp"

namespace camo {

void TrainConfig::validate() const {
  if (epochs < 0 || batch_size < 1 || !(lr > 0) || !(gamma > 0 && gamma <= 1) || !(multiplier >= 0) ||
      !(momentum >= 0 && momentum < 1))
    throw DomainError("train-predictor: invalid config");
  if (optimizer != "sgd" && optimizer != "adam") throw DomainError("train-predictor: optimizer must be sgd or adam");
  clock.validate();
}

nlohmann::json TrainConfig::to_json() const {
  return {{"epochs", epochs},     {"batch_size", batch_size}, {"lr", lr},     {"gamma", gamma},
          {"momentum", momentum}, {"optimizer", optimizer},   {"seed", seed}, {"m", multiplier},
          {"clock", clock.to_json()}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.gamma = j.value("gamma", c.gamma);
  c.momentum = j.value("momentum", c.momentum);
  c.optimizer = j.value("optimizer", c.optimizer);
  c.seed = j.value("seed", c.seed);
  c.multiplier = j.value("m", c.multiplier);
  if (j.contains("clock")) c.clock = StreamClock::from_json(j["clock"]);
  c.validate();
  return c;
}

double learning_rate_at(const TrainConfig& cfg, int epoch) { return cfg.lr * std::pow(cfg.gamma, epoch); }

namespace {

void copy_state(torch::nn::Module& dst, const torch::nn::Module& src) {
  torch::NoGradGuard no_grad;
  auto sp = src.named_parameters(true), dp = dst.named_parameters(true);
  for (const auto& p : sp) dp[p.key()].copy_(p.value());
  auto sb = src.named_buffers(true), db = dst.named_buffers(true);
  for (const auto& b : sb) db[b.key()].copy_(b.value());
}

struct Batch {
  at::Tensor samples;
  std::vector<std::int64_t> lengths;
  std::vector<std::vector<int>> targets;
  std::vector<float> eps;
};

Batch gather(const Dataset& data, std::span<const std::size_t> idx, double multiplier) {
  Batch b;
  std::vector<const Waveform*> ptrs;
  for (auto i : idx) {
    ptrs.push_back(&data[i].audio);
    b.targets.push_back(Alphabet::encode(data[i].transcript));
    b.eps.push_back(compute_epsilon(data[i].audio, multiplier).epsilon);
  }
  b.samples = stack_padded(ptrs, &b.lengths);
  return b;
}

std::vector<std::size_t> attackable(const Dataset& data, const StreamClock& clock) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (clock.slot_count(data[i].audio.size()) > 0 && !data[i].transcript.empty()) out.push_back(i);
  return out;
}

struct AttackedEval {
  double loss = 0.0;
  double cer = 0.0;
};

AttackedEval evaluate_attacked(PredictorModel& model, AsrBackend& target, const Dataset& data, double multiplier,
                               const StreamClock& clock, int batch_size) {
  torch::NoGradGuard no_grad;
  model->eval();
  double total = 0.0;
  CorpusErrors err;
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t s = 0; s < idx.size(); s += static_cast<std::size_t>(batch_size)) {
    const auto e = std::min(idx.size(), s + static_cast<std::size_t>(batch_size));
    std::span<const std::size_t> sub(idx.data() + s, e - s);
    auto b = gather(data, sub, multiplier);
    auto x = b.samples + predictive_perturbation(model, b.samples, b.lengths, torch::tensor(b.eps), clock);
    total += target.loss(x, b.lengths, b.targets).sum().item<double>();
    const auto hyp = target.transcribe(x, b.lengths);
    for (std::size_t k = 0; k < sub.size(); ++k) err.add(data[sub[k]].transcript, hyp[k]);
  }
  return {data.empty() ? 0.0 : total / static_cast<double>(data.size()), err.cer()};
}

}  // namespace

at::Tensor predictive_perturbation(PredictorModel& model, const at::Tensor& samples,
                                   std::span<const std::int64_t> lengths, const at::Tensor& eps,
                                   const StreamClock& clock) {
  clock.validate();
  const auto B = samples.size(0), N = samples.size(1);
  const auto c = clock.context_samples(), r = clock.chunk_samples(), d = clock.delay_samples();
  if (r != model->architecture().output_length)
    throw DomainError("predictive_perturbation: chunk length differs from the network's output length");

  std::vector<at::Tensor> windows;
  std::vector<std::int64_t> owner, slots(static_cast<std::size_t>(B));
  for (std::int64_t b = 0; b < B; ++b) {
    slots[static_cast<std::size_t>(b)] = clock.slot_count(lengths[static_cast<std::size_t>(b)]);
    for (std::int64_t k = 0; k < slots[static_cast<std::size_t>(b)]; ++k) {
      const auto t = clock.context_end(k);
      windows.push_back(samples[b].slice(0, t - c, t));
      owner.push_back(b);
    }
  }
  if (windows.empty()) return torch::zeros_like(samples);

  auto spec = stft_batch(torch::stack(windows), context_stft(model->architecture()));
  auto eps_ctx = eps.to(torch::kFloat).index_select(0, torch::tensor(owner));
  auto chunks = model->forward(spec, eps_ctx);  // [S, r]

  std::vector<at::Tensor> rows;
  std::int64_t next = 0;
  for (std::int64_t b = 0; b < B; ++b) {
    const auto n = lengths[static_cast<std::size_t>(b)];
    const auto k = slots[static_cast<std::size_t>(b)];
    if (k == 0) {
      rows.push_back(torch::zeros({N}));
      continue;
    }
    auto body = chunks.slice(0, next, next + k).reshape({-1});
    next += k;
    const auto start = c + d;
    auto row = torch::cat({torch::zeros({start}), body}).slice(0, 0, n);
    if (n < N) row = torch::cat({row, torch::zeros({N - n})});
    rows.push_back(row);
  }
  return torch::stack(rows);
}

PredictorModel clone_predictor(PredictorModel& model) {
  PredictorModel out(model->architecture());
  copy_state(*out, *model);
  out->metadata = model->metadata;
  return out;
}

AsrModel clone_asr(AsrModel& model) {
  AsrModel out(model->architecture());
  copy_state(*out, *model);
  out->metadata = model->metadata;
  out->eval();
  return out;
}

double attacked_loss(PredictorModel& model, AsrBackend& target, const Dataset& data, double multiplier,
                     const StreamClock& clock, int batch_size) {
  return evaluate_attacked(model, target, data, multiplier, clock, batch_size).loss;
}

PredictorTrainReport train_predictor(PredictorModel& model, AsrBackend& target, const Dataset& train,
                                     const Dataset& heldout, const TrainConfig& cfg,
                                     const std::function<void(const EpochLog&)>& on_epoch) {
  cfg.validate();
  require_gradients(target, "train-predictor");
  PredictorTrainReport report;
  if (cfg.epochs == 0) return report;
  auto usable = attackable(train, cfg.clock);
  if (usable.empty()) throw DomainError("train-predictor: no training utterance is long enough to attack");
  if (!heldout.empty())
    report.initial_heldout_loss = attacked_loss(model, target, heldout, cfg.multiplier, cfg.clock);

  std::mt19937_64 rng(derive_seed(cfg.seed, "predictor-shuffle"));
  auto params = model->parameters();
  std::unique_ptr<torch::optim::Optimizer> opt;
  if (cfg.optimizer == "adam")
    opt = std::make_unique<torch::optim::Adam>(params, torch::optim::AdamOptions(cfg.lr));
  else
    opt = std::make_unique<torch::optim::SGD>(params, torch::optim::SGDOptions(cfg.lr).momentum(cfg.momentum));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = learning_rate_at(cfg, epoch);
    for (auto& g : opt->param_groups()) {
      if (cfg.optimizer == "adam")
        static_cast<torch::optim::AdamOptions&>(g.options()).lr(lr);
      else
        static_cast<torch::optim::SGDOptions&>(g.options()).lr(lr);
    }
    std::shuffle(usable.begin(), usable.end(), rng);
    double sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t s = 0; s < usable.size(); s += static_cast<std::size_t>(cfg.batch_size)) {
      const auto e = std::min(usable.size(), s + static_cast<std::size_t>(cfg.batch_size));
      auto b = gather(train, std::span<const std::size_t>(usable.data() + s, e - s), cfg.multiplier);
      std::int64_t contexts = 0;
      for (auto n : b.lengths) contexts += cfg.clock.slot_count(n);
      if (contexts < 2) continue;  // batch norm needs two samples in training mode
      model->train();
      auto pert = predictive_perturbation(model, b.samples, b.lengths, torch::tensor(b.eps), cfg.clock);
      auto loss = target.loss(b.samples + pert, b.lengths, b.targets).mean();
      auto grads = torch::autograd::grad({-loss}, params);
      for (std::size_t i = 0; i < params.size(); ++i) params[i].mutable_grad() = grads[i];
      opt->step();
      sum += loss.item<double>() * static_cast<double>(e - s);
      seen += e - s;
    }
    EpochLog log;
    log.epoch = epoch + 1;
    log.lr = lr;
    log.train_loss = seen ? sum / static_cast<double>(seen) : 0.0;
    if (!heldout.empty()) {
      auto ev = evaluate_attacked(model, target, heldout, cfg.multiplier, cfg.clock, 16);
      log.heldout_loss = ev.loss;
      log.heldout_cer = ev.cer;
    }
    report.epochs.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  model->eval();
  return report;
}

PredictorModel retrain_predictor_for(AsrBackend& defended_target, PredictorModel& base, const Dataset& train,
                                     const Dataset& heldout, const TrainConfig& cfg,
                                     const std::function<void(const EpochLog&)>& on_epoch) {
  auto model = clone_predictor(base);
  train_predictor(model, defended_target, train, heldout, cfg, on_epoch);
  return model;
}

std::pair<int, int> split_clean_attacked(int batch_size) {
  if (batch_size < 1) throw DomainError("batch size must be positive");
  return {batch_size - batch_size / 2, batch_size / 2};
}

void AdvTrainConfig::validate() const {
  if (max_epochs < 0 || batch_size < 2 || !(lr > 0) || pgd_steps < 0 || !(multiplier >= 0) ||
      !(step_fraction > 0 && step_fraction <= 1))
    throw DomainError("advtrain: invalid config");
}

nlohmann::json AdvTrainConfig::to_json() const {
  return {{"max_epochs", max_epochs},
          {"batch_size", batch_size},
          {"lr", lr},
          {"pgd_steps", pgd_steps},
          {"step_fraction", step_fraction},
          {"m", multiplier},
          {"seed", seed},
          {"target_attacked_cer", target_attacked_cer},
          {"max_clean_cer", max_clean_cer}};
}

AdvTrainConfig AdvTrainConfig::from_json(const nlohmann::json& j) {
  AdvTrainConfig c;
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.pgd_steps = j.value("pgd_steps", c.pgd_steps);
  c.step_fraction = j.value("step_fraction", c.step_fraction);
  c.multiplier = j.value("m", c.multiplier);
  c.seed = j.value("seed", c.seed);
  c.target_attacked_cer = j.value("target_attacked_cer", c.target_attacked_cer);
  c.max_clean_cer = j.value("max_clean_cer", c.max_clean_cer);
  c.validate();
  return c;
}

nlohmann::json AdvEpochLog::to_json() const {
  return {{"epoch", epoch},
          {"lr", lr},
          {"train_loss", train_loss},
          {"heldout_clean_cer", heldout_clean_cer},
          {"heldout_attacked_cer", heldout_attacked_cer}};
}

namespace {

double pgd_cer(ReferenceAsr& asr, const Dataset& data, const PgdConfig& pgd, int batch_size) {
  CorpusErrors err;
  for (std::size_t s = 0; s < data.size(); s += static_cast<std::size_t>(batch_size)) {
    const auto e = std::min(data.size(), s + static_cast<std::size_t>(batch_size));
    std::vector<std::size_t> idx(e - s);
    std::iota(idx.begin(), idx.end(), s);
    auto b = gather(data, idx, pgd.multiplier);
    auto alpha = pgd_batch(asr, b.samples, b.lengths, b.targets, torch::tensor(b.eps), pgd);
    const auto hyp = asr.transcribe(b.samples + alpha, b.lengths);
    for (std::size_t k = 0; k < idx.size(); ++k) err.add(data[idx[k]].transcript, hyp[k]);
  }
  return err.cer();
}

}  // namespace

AdvTrainReport adversarial_train_asr(AsrModel& model, const Dataset& train, const Dataset& heldout,
                                     const AdvTrainConfig& cfg,
                                     const std::function<void(const AdvEpochLog&)>& on_epoch) {
  cfg.validate();
  if (train.empty()) throw DomainError("advtrain: empty training corpus");
  AdvTrainReport report;
  report.stop_reason = "max_epochs";
  ReferenceAsr asr(model, "advtrain");
  PgdConfig pgd{cfg.pgd_steps, cfg.step_fraction, cfg.multiplier};
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(derive_seed(cfg.seed, "advtrain-shuffle"));
  torch::optim::Adam opt(model->parameters(), torch::optim::AdamOptions(cfg.lr));

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double sum = 0.0;
    for (std::size_t s = 0; s < order.size(); s += static_cast<std::size_t>(cfg.batch_size)) {
      const auto e = std::min(order.size(), s + static_cast<std::size_t>(cfg.batch_size));
      const auto bs = static_cast<int>(e - s);
      if (bs < 2) continue;
      const auto [n_clean, n_attacked] = split_clean_attacked(bs);
      auto b = gather(train, std::span<const std::size_t>(order.data() + s, e - s), cfg.multiplier);
      std::span<const std::int64_t> all(b.lengths);
      auto att_x = b.samples.slice(0, n_clean, bs);
      std::vector<std::vector<int>> att_t(b.targets.begin() + n_clean, b.targets.end());
      auto eps = torch::tensor(std::vector<float>(b.eps.begin() + n_clean, b.eps.end()));
      auto alpha = pgd_batch(asr, att_x, all.subspan(static_cast<std::size_t>(n_clean)), att_t, eps, pgd);
      auto x = torch::cat({b.samples.slice(0, 0, n_clean), att_x + alpha});

      model->train();
      std::vector<std::int64_t> frames;
      for (auto n : b.lengths) frames.push_back(model->output_frames(n));
      auto loss = ctc_loss(model->forward(x), frames, b.targets, 0, /*zero_infeasible=*/true).mean();
      opt.zero_grad();
      loss.backward();
      torch::nn::utils::clip_grad_norm_(model->parameters(), 10.0);
      opt.step();
      sum += loss.item<double>() * bs;
    }
    model->eval();
    AdvEpochLog log;
    log.epoch = epoch + 1;
    log.lr = cfg.lr;
    log.train_loss = sum / static_cast<double>(order.size());
    if (!heldout.empty()) {
      log.heldout_clean_cer = dataset_cer(asr, heldout);
      log.heldout_attacked_cer = pgd_cer(asr, heldout, pgd, 16);
    }
    report.epochs.push_back(log);
    if (on_epoch) on_epoch(log);
    if (!heldout.empty() && cfg.target_attacked_cer >= 0 && log.heldout_attacked_cer <= cfg.target_attacked_cer) {
      report.stop_reason = "attacked_cer_target";
      break;
    }
    if (!heldout.empty() && cfg.max_clean_cer >= 0 && log.heldout_clean_cer > cfg.max_clean_cer) {
      report.stop_reason = "clean_cer_ceiling";
      break;
    }
  }
  model->eval();
  model->metadata.note = "adversarially trained";
  return report;
}

}  // namespace camo
