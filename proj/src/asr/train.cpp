// src/asr/train.cpp

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

#include "camo/asr/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <torch/torch.h>

#include "camo/asr/alphabet.hpp"
#include "camo/asr/ctc.hpp"
#include "camo/core/error.hpp"
#include "camo/core/rng.hpp"
#include "camo/eval/metrics.hpp"

namespace camo {

AsrModel make_asr(const AsrArchitecture& arch, std::uint64_t seed) {
  torch::manual_seed(derive_seed(seed, "asr-init"));
  return AsrModel(arch);
}

nlohmann::json AsrTrainConfig::to_json() const {
  return {{"epochs", epochs}, {"batch_size", batch_size}, {"lr", lr},
          {"lr_decay", lr_decay}, {"grad_clip", grad_clip}, {"seed", seed}, {"keep_best", keep_best}};
}

AsrTrainConfig AsrTrainConfig::from_json(const nlohmann::json& j) {
  AsrTrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.lr_decay = j.value("lr_decay", c.lr_decay);
  c.grad_clip = j.value("grad_clip", c.grad_clip);
  c.seed = j.value("seed", c.seed);
  c.keep_best = j.value("keep_best", c.keep_best);
  if (c.epochs < 0 || c.batch_size < 1 || !(c.lr > 0)) throw DomainError("train-asr: invalid config");
  return c;
}

nlohmann::json EpochLog::to_json() const {
  return {{"epoch", epoch}, {"lr", lr}, {"train_loss", train_loss},
          {"heldout_loss", heldout_loss}, {"heldout_cer", heldout_cer}};
}

namespace {

struct Batch {
  at::Tensor samples;
  std::vector<std::int64_t> lengths;
  std::vector<std::vector<int>> targets;
};

Batch make_batch(const Dataset& data, std::span<const std::size_t> idx) {
  Batch b;
  std::vector<const Waveform*> ptrs;
  for (auto i : idx) {
    ptrs.push_back(&data[i].audio);
    b.targets.push_back(Alphabet::encode(data[i].transcript));
  }
  b.samples = stack_padded(ptrs, &b.lengths);
  return b;
}

template <class Fn>
void for_batches(std::size_t n, int batch_size, Fn&& fn) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t s = 0; s < n; s += static_cast<std::size_t>(batch_size)) {
    const auto e = std::min(n, s + static_cast<std::size_t>(batch_size));
    fn(std::span<const std::size_t>(idx.data() + s, e - s));
  }
}

}  // namespace

std::vector<std::string> transcribe_dataset(AsrBackend& asr, const Dataset& data, int batch_size) {
  std::vector<std::string> out;
  for_batches(data.size(), batch_size, [&](std::span<const std::size_t> idx) {
    auto b = make_batch(data, idx);
    auto hyp = asr.transcribe(b.samples, b.lengths);
    out.insert(out.end(), hyp.begin(), hyp.end());
  });
  return out;
}

double dataset_cer(AsrBackend& asr, const Dataset& data, int batch_size) {
  const auto hyp = transcribe_dataset(asr, data, batch_size);
  CorpusErrors err;
  for (std::size_t i = 0; i < data.size(); ++i) err.add(data[i].transcript, hyp[i]);
  return err.cer();
}

double dataset_loss(AsrBackend& asr, const Dataset& data, int batch_size) {
  require_gradients(asr, "dataset_loss");
  torch::NoGradGuard no_grad;
  double total = 0.0;
  for_batches(data.size(), batch_size, [&](std::span<const std::size_t> idx) {
    auto b = make_batch(data, idx);
    total += asr.loss(b.samples, b.lengths, b.targets).sum().item<double>();
  });
  return data.empty() ? 0.0 : total / static_cast<double>(data.size());
}

AsrTrainReport train_asr(AsrModel& model, const Dataset& train, const Dataset& heldout,
                         const AsrTrainConfig& cfg, const std::function<void(const EpochLog&)>& on_epoch) {
  if (train.empty()) throw DomainError("train-asr: empty training corpus");
  AsrTrainReport report;

  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto labels = Alphabet::encode(train[i].transcript);
    const auto frames = model->output_frames(static_cast<std::int64_t>(train[i].audio.size()));
    if (labels.empty() || ctc_min_frames(labels) > frames)
      report.skipped++;
    else
      usable.push_back(i);
  }
  if (usable.empty()) throw AlignmentError("train-asr: no alignable training utterances");
  if (cfg.epochs == 0) return report;

  torch::manual_seed(derive_seed(cfg.seed, "asr-train"));
  std::mt19937_64 rng(derive_seed(cfg.seed, "asr-shuffle"));
  torch::optim::Adam opt(model->parameters(), torch::optim::AdamOptions(cfg.lr));
  ReferenceAsr eval_backend(model, "train-eval");

  // parameters and buffers of the best held-out epoch
  std::vector<at::Tensor> best;
  double best_cer = std::numeric_limits<double>::infinity(), best_loss = best_cer;
  auto state = [&] {
    std::vector<at::Tensor> all = model->parameters();
    for (auto& b : model->buffers()) all.push_back(b);
    return all;
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.lr * std::pow(cfg.lr_decay, epoch);
    for (auto& g : opt.param_groups()) static_cast<torch::optim::AdamOptions&>(g.options()).lr(lr);
    std::shuffle(usable.begin(), usable.end(), rng);
    model->train();
    double sum = 0.0;
    for (std::size_t s = 0; s < usable.size(); s += static_cast<std::size_t>(cfg.batch_size)) {
      const auto e = std::min(usable.size(), s + static_cast<std::size_t>(cfg.batch_size));
      auto b = make_batch(train, std::span<const std::size_t>(usable.data() + s, e - s));
      std::vector<std::int64_t> frames;
      for (auto n : b.lengths) frames.push_back(model->output_frames(n));
      auto lp = model->forward(b.samples);
      auto loss = ctc_loss(lp, frames, b.targets).mean();
      opt.zero_grad();
      loss.backward();
      torch::nn::utils::clip_grad_norm_(model->parameters(), cfg.grad_clip);
      opt.step();
      sum += loss.item<double>() * static_cast<double>(e - s);
    }
    EpochLog log;
    log.epoch = epoch + 1;
    log.lr = lr;
    log.train_loss = sum / static_cast<double>(usable.size());
    if (!heldout.empty()) {
      log.heldout_loss = dataset_loss(eval_backend, heldout);
      log.heldout_cer = dataset_cer(eval_backend, heldout);
    }
    report.epochs.push_back(log);
    if (on_epoch) on_epoch(log);
    if (cfg.keep_best && !heldout.empty() &&
        (log.heldout_cer < best_cer || (log.heldout_cer == best_cer && log.heldout_loss < best_loss))) {
      best_cer = log.heldout_cer;
      best_loss = log.heldout_loss;
      report.best_epoch = log.epoch;
      best.clear();
      for (auto& t : state()) best.push_back(t.detach().clone());
    }
  }
  if (report.best_epoch == 0) report.best_epoch = cfg.epochs;
  if (!best.empty() && report.best_epoch != cfg.epochs) {
    torch::NoGradGuard no_grad;
    auto now = state();
    for (std::size_t i = 0; i < now.size(); ++i) now[i].copy_(best[i]);
  }
  model->eval();
  model->metadata.epochs += cfg.epochs;
  return report;
}

}  // namespace camo
