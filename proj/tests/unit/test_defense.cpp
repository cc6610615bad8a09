// tests/unit/test_defense.cpp

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

#include <cmath>

#include <gtest/gtest.h>
#include <torch/torch.h>

#include "../support/fixtures.hpp"
#include "camo/core/digest.hpp"
#include "camo/core/error.hpp"
#include "camo/data/synth.hpp"
#include "camo/defense/denoiser.hpp"
#include "camo/defense/training.hpp"

namespace camo {
namespace {

Dataset small_corpus(std::uint64_t seed, int n = 4) {
  SynthConfig cfg;
  cfg.seed = seed;
  cfg.num_utterances = n;
  cfg.num_speakers = 2;
  cfg.min_duration = 2.8;
  cfg.max_duration = 3.4;
  return synthesize_corpus(cfg);
}

double rms(const std::vector<float>& v) {
  double s = 0;
  for (float x : v) s += double(x) * x;
  return std::sqrt(s / std::max<std::size_t>(v.size(), 1));
}

// ---- denoiser

TEST(SpectralGate, SilenceStaysSilent) {
  SpectralGateDenoiser d;
  auto out = d.denoise(Waveform::zeros(16000));
  EXPECT_EQ(out.size(), 16000);
  EXPECT_EQ(out.peak(), 0.0f);
}

TEST(SpectralGate, KeepsLengthAndZeroesPadding) {
  SpectralGateDenoiser d;
  auto a = fixture::speechlike(1.0, 1), b = fixture::speechlike(0.6, 2);
  std::vector<std::int64_t> lengths{a.size(), b.size()};
  auto batch = stack_padded({&a, &b});
  auto out = d.apply(batch, lengths);
  ASSERT_EQ(out.sizes(), batch.sizes());
  EXPECT_EQ(out[1].slice(0, b.size()).abs().max().item<float>(), 0.0f);
  // batched equals one at a time
  auto single = d.denoise(b);
  EXPECT_LT((out[1].slice(0, 0, b.size()) - to_tensor(single)).abs().max().item<float>(), 1e-5f);
}

TEST(SpectralGate, RemovesStationaryNoiseMoreThanTone) {
  SpectralGateDenoiser d;
  const int n = 32000;
  Waveform tone = Waveform::zeros(n), noise = Waveform::zeros(n);
  std::mt19937 rng(1);
  std::normal_distribution<float> g(0.0f, 0.01f);
  for (int i = 0; i < n; ++i) {
    // tone bursts in the second half only, so quiet frames exist
    tone.samples[i] = i > n / 2 ? 0.5f * std::sin(2 * 3.14159265f * 440 * i / 16000.0f) : 0.0f;
    noise.samples[i] = g(rng);
  }
  Waveform mixture = tone;
  for (int i = 0; i < n; ++i) mixture.samples[i] += noise.samples[i];
  auto out = d.denoise(mixture);
  std::vector<float> head(out.samples.begin(), out.samples.begin() + n / 2 - 400);
  std::vector<float> noise_head(noise.samples.begin(), noise.samples.begin() + n / 2 - 400);
  EXPECT_LT(rms(head), 0.5 * rms(noise_head));
  std::vector<float> tail(out.samples.begin() + n / 2 + 400, out.samples.end());
  std::vector<float> tone_tail(tone.samples.begin() + n / 2 + 400, tone.samples.end());
  EXPECT_GT(rms(tail), 0.8 * rms(tone_tail));
}

TEST(SpectralGate, SecondPassChangesLittle) {
  SpectralGateDenoiser d;
  auto x = fixture::speechlike(2.0, 3);
  auto once = d.denoise(x), twice = d.denoise(once);
  std::vector<float> diff(once.samples.size()), first(once.samples.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = twice.samples[i] - once.samples[i];
    first[i] = once.samples[i] - x.samples[i];
  }
  EXPECT_LE(rms(diff), rms(first) + 1e-6);
}

TEST(SpectralGate, GradientFlowsToInput) {
  SpectralGateDenoiser d;
  auto x = to_tensor(fixture::speechlike(1.0, 4)).unsqueeze(0).requires_grad_(true);
  std::vector<std::int64_t> len{x.size(1)};
  d.apply(x, len).pow(2).sum().backward();
  EXPECT_TRUE(torch::isfinite(x.grad()).all().item<bool>());
  EXPECT_GT(x.grad().abs().max().item<float>(), 0.0f);
}

TEST(SpectralGate, OptionsRoundTrip) {
  SpectralGateOptions o;
  o.over_subtraction = 1.5;
  o.min_gain = 0.2;
  auto back = SpectralGateOptions::from_json(o.to_json());
  EXPECT_EQ(back.over_subtraction, 1.5);
  EXPECT_EQ(back.min_gain, 0.2);
}

TEST(DenoisedAsr, TranscribesTheDenoisedAudio) {
  auto asr = fixture::tiny_asr(3);
  auto den = std::make_shared<SpectralGateDenoiser>();
  DenoisedAsr wrapped(asr, den);
  auto w = fixture::speechlike(1.5, 5);
  EXPECT_EQ(wrapped.transcribe(w), asr->transcribe(den->denoise(w)));
  EXPECT_TRUE(wrapped.differentiable());
}

// ---- predictor training

TEST(PredictorTraining, LearningRateDecays) {
  TrainConfig c;
  EXPECT_DOUBLE_EQ(learning_rate_at(c, 0), 1.5e-4);
  EXPECT_NEAR(learning_rate_at(c, 3), 1.5e-4 * std::pow(0.99, 3), 1e-18);
}

TEST(PredictorTraining, HalfOfEachBatchIsAttacked) {
  EXPECT_EQ(split_clean_attacked(32), std::make_pair(16, 16));
  EXPECT_EQ(split_clean_attacked(5), std::make_pair(3, 2));
  EXPECT_EQ(split_clean_attacked(1), std::make_pair(1, 0));
}

TEST(PredictorTraining, ConfigValidation) {
  TrainConfig c;
  c.optimizer = "rmsprop";
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.optimizer = "adam";
  EXPECT_EQ(TrainConfig::from_json(c.to_json()).optimizer, "adam");
}

TEST(PredictorTraining, PerturbationTensorMatchesScheduler) {
  auto arch = fixture::tiny_predictor_arch();
  auto m = make_predictor(arch, 5);
  auto w = fixture::speechlike(3.7, 6);
  PredictiveGenerator gen(make_predictor(arch, 5));
  StreamClock clock;
  auto sched = schedule_stream(w, gen, clock, 0.008, EpsilonBinding::kFullUtterance);
  std::vector<std::int64_t> len{w.size()};
  auto eps = torch::tensor({sched.plan.chunks[0].perturbation.budget.epsilon});
  m->eval();
  torch::NoGradGuard g;
  auto delta = predictive_perturbation(m, to_tensor(w).unsqueeze(0), len, eps, clock)[0];
  auto want = to_tensor(sched.attacked) - to_tensor(w);
  EXPECT_LT((delta - want).abs().max().item<float>(), 1e-6f);
  EXPECT_EQ(delta.slice(0, 0, 40000).abs().max().item<float>(), 0.0f);
}

TEST(PredictorTraining, ZeroEpochsLeavesParameters) {
  auto data = small_corpus(1, 3);
  auto asr = fixture::tiny_asr(1);
  auto m = make_predictor(fixture::tiny_predictor_arch(), 2);
  const auto before = parameter_digest(*m);
  TrainConfig c;
  c.epochs = 0;
  train_predictor(m, *asr, data, data, c);
  EXPECT_EQ(parameter_digest(*m), before);
}

TEST(PredictorTraining, TargetStaysFrozenAndRunIsReproducible) {
  auto data = small_corpus(2, 4);
  auto asr = fixture::tiny_asr(2);
  const auto target_before = parameter_digest(*asr->model());
  TrainConfig c;
  c.epochs = 1;
  c.batch_size = 4;
  c.lr = 1e-3;
  c.optimizer = "adam";
  auto m1 = make_predictor(fixture::tiny_predictor_arch(), 3);
  const auto init = parameter_digest(*m1);
  int logged = 0;
  auto rep = train_predictor(m1, *asr, data, data, c, [&](const EpochLog&) { ++logged; });
  EXPECT_EQ(parameter_digest(*asr->model()), target_before);
  EXPECT_NE(parameter_digest(*m1), init);
  EXPECT_EQ(logged, 1);
  EXPECT_EQ(rep.epochs.size(), 1u);
  EXPECT_TRUE(std::isfinite(rep.epochs[0].train_loss));

  auto m2 = make_predictor(fixture::tiny_predictor_arch(), 3);
  train_predictor(m2, *asr, data, data, c);
  EXPECT_EQ(parameter_digest(*m2), parameter_digest(*m1));
}

TEST(PredictorTraining, RetrainingStartsFromACopy) {
  auto data = small_corpus(3, 3);
  auto asr = fixture::tiny_asr(3);
  DenoisedAsr defended(asr, std::make_shared<SpectralGateDenoiser>());
  auto base = make_predictor(fixture::tiny_predictor_arch(), 4);
  const auto base_digest = parameter_digest(*base);
  TrainConfig c;
  c.epochs = 1;
  c.batch_size = 3;
  auto re = retrain_predictor_for(defended, base, data, data, c);
  EXPECT_EQ(parameter_digest(*base), base_digest);
  EXPECT_NE(parameter_digest(*re), base_digest);
}

TEST(PredictorTraining, BlackBoxTargetIsRejected) {
  CommandAsr ext("true");
  auto data = small_corpus(4, 2);
  auto m = make_predictor(fixture::tiny_predictor_arch(), 1);
  TrainConfig c;
  c.epochs = 1;
  EXPECT_THROW(train_predictor(m, ext, data, data, c), CapabilityError);
}

// ---- adversarial training

TEST(AdvTraining, ConfigRoundTripAndValidation) {
  AdvTrainConfig c;
  c.pgd_steps = 5;
  EXPECT_EQ(AdvTrainConfig::from_json(c.to_json()).pgd_steps, 5);
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(AdvTraining, OneEpochUpdatesAndLogs) {
  auto data = small_corpus(5, 4);
  auto model = fixture::tiny_asr_model(5);
  auto copy = clone_asr(model);
  const auto before = parameter_digest(*model);
  EXPECT_EQ(parameter_digest(*copy), before);
  AdvTrainConfig c;
  c.max_epochs = 1;
  c.batch_size = 4;
  auto rep = adversarial_train_asr(model, data, data, c);
  ASSERT_EQ(rep.epochs.size(), 1u);
  EXPECT_FALSE(rep.stop_reason.empty());
  EXPECT_NE(parameter_digest(*model), before);
  EXPECT_EQ(parameter_digest(*copy), before);
  EXPECT_GE(rep.epochs[0].heldout_attacked_cer, 0.0);
}

TEST(AdvTraining, StopsOnCleanCerCeiling) {
  auto data = small_corpus(6, 2);
  auto model = fixture::tiny_asr_model(6);
  AdvTrainConfig c;
  c.max_epochs = 3;
  c.batch_size = 2;
  c.max_clean_cer = 0.0;  // an untrained model is above this right away
  auto rep = adversarial_train_asr(model, data, data, c);
  EXPECT_EQ(rep.epochs.size(), 1u);
}

}  // namespace
}  // namespace camo
