// camo/asr/backend.hpp

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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <ATen/core/Tensor.h>

#include "camo/asr/decode.hpp"
#include "camo/asr/lm.hpp"
#include "camo/asr/model.hpp"
#include "camo/audio/waveform.hpp"

namespace camo {

/// What every attack, defense and evaluation talks to. White-box backends
/// also provide a CTC loss that is differentiable w.r.t. the input samples;
/// black-box backends only transcribe.
class AsrBackend {
 public:
  virtual ~AsrBackend() = default;

  virtual std::string name() const = 0;

  /// Transcribes a zero-padded [B, N] batch whose true lengths are given.
  virtual std::vector<std::string> transcribe(const at::Tensor& samples,
                                              std::span<const std::int64_t> lengths) = 0;

  virtual bool differentiable() const { return false; }

  /// [B] per-utterance CTC losses, differentiable w.r.t. `samples`.
  /// Throws CapabilityError on black-box backends.
  virtual at::Tensor loss(const at::Tensor& samples, std::span<const std::int64_t> lengths,
                          const std::vector<std::vector<int>>& targets);

  std::vector<std::string> transcribe(const std::vector<Waveform>& batch);
  std::string transcribe(const Waveform& w);
};

/// Throws CapabilityError unless the backend exposes input gradients.
void require_gradients(const AsrBackend& backend, const char* who);

/// The reference model behind the backend contract, with optional LM beam
/// decoding. Inference always runs the model in eval mode.
class ReferenceAsr : public AsrBackend {
 public:
  explicit ReferenceAsr(AsrModel model, std::string name = "reference");

  void set_language_model(std::shared_ptr<const CharNgramLm> lm, BeamOptions opts);
  void clear_language_model();

  std::string name() const override { return name_; }
  bool differentiable() const override { return true; }
  std::vector<std::string> transcribe(const at::Tensor& samples,
                                      std::span<const std::int64_t> lengths) override;
  at::Tensor loss(const at::Tensor& samples, std::span<const std::int64_t> lengths,
                  const std::vector<std::vector<int>>& targets) override;
  using AsrBackend::transcribe;

  /// [B, T, C] log-probabilities plus per-item frame counts.
  at::Tensor log_probs(const at::Tensor& samples, std::span<const std::int64_t> lengths,
                       std::vector<std::int64_t>& frames);

  AsrModel& model() { return model_; }

 private:
  AsrModel model_;
  std::string name_;
  std::shared_ptr<const CharNgramLm> lm_;
  BeamOptions beam_;
};

/// Black-box adapter around an external recognizer executable. The command
/// is run once per utterance with the path of a 16 kHz mono WAV appended as
/// its last argument; stdout (normalized) is the transcript.
class CommandAsr : public AsrBackend {
 public:
  explicit CommandAsr(std::string command, std::string name = "external");

  std::string name() const override { return name_; }
  std::vector<std::string> transcribe(const at::Tensor& samples,
                                      std::span<const std::int64_t> lengths) override;
  using AsrBackend::transcribe;

 private:
  std::string command_;
  std::string name_;
};

}  // namespace camo
