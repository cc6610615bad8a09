// src/asr/backend.cpp

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

#include "camo/asr/backend.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <memory>

#include <unistd.h>

#include <torch/torch.h>

#include "camo/asr/alphabet.hpp"
#include "camo/asr/ctc.hpp"
#include "camo/audio/wav_io.hpp"
#include "camo/core/error.hpp"

namespace camo {

at::Tensor AsrBackend::loss(const at::Tensor&, std::span<const std::int64_t>,
                            const std::vector<std::vector<int>>&) {
  throw CapabilityError("ASR backend '" + name() + "' does not expose gradients");
}

std::vector<std::string> AsrBackend::transcribe(const std::vector<Waveform>& batch) {
  if (batch.empty()) return {};
  std::vector<const Waveform*> ptrs;
  for (const auto& w : batch) ptrs.push_back(&w);
  std::vector<std::int64_t> lengths;
  auto x = stack_padded(ptrs, &lengths);
  return transcribe(x, lengths);
}

std::string AsrBackend::transcribe(const Waveform& w) { return transcribe(std::vector<Waveform>{w}).front(); }

void require_gradients(const AsrBackend& backend, const char* who) {
  if (!backend.differentiable())
    throw CapabilityError(std::string(who) + " needs input gradients, but ASR backend '" +
                          backend.name() + "' is black-box");
}

ReferenceAsr::ReferenceAsr(AsrModel model, std::string name) : model_(std::move(model)), name_(std::move(name)) {}

void ReferenceAsr::set_language_model(std::shared_ptr<const CharNgramLm> lm, BeamOptions opts) {
  lm_ = std::move(lm);
  beam_ = opts;
}

void ReferenceAsr::clear_language_model() { lm_.reset(); }

at::Tensor ReferenceAsr::log_probs(const at::Tensor& samples, std::span<const std::int64_t> lengths,
                                   std::vector<std::int64_t>& frames) {
  if (samples.dim() != 2 || static_cast<std::size_t>(samples.size(0)) != lengths.size())
    throw DomainError("asr: expected [B, N] samples with one length per item");
  model_->eval();
  frames.clear();
  for (auto n : lengths) frames.push_back(model_->output_frames(n));
  return model_->forward(samples);
}

std::vector<std::string> ReferenceAsr::transcribe(const at::Tensor& samples,
                                                  std::span<const std::int64_t> lengths) {
  torch::NoGradGuard no_grad;
  std::vector<std::int64_t> frames;
  auto lp = log_probs(samples, lengths, frames);
  std::vector<std::string> out;
  out.reserve(frames.size());
  for (std::size_t b = 0; b < frames.size(); ++b) {
    auto item = lp[static_cast<std::int64_t>(b)].narrow(0, 0, frames[b]);
    out.push_back(lm_ ? beam_decode(item, lm_.get(), beam_) : greedy_decode(item));
  }
  return out;
}

at::Tensor ReferenceAsr::loss(const at::Tensor& samples, std::span<const std::int64_t> lengths,
                              const std::vector<std::vector<int>>& targets) {
  std::vector<std::int64_t> frames;
  auto lp = log_probs(samples, lengths, frames);
  return ctc_loss(lp, frames, targets);
}

CommandAsr::CommandAsr(std::string command, std::string name)
    : command_(std::move(command)), name_(std::move(name)) {
  if (command_.empty()) throw DomainError("external ASR: empty command");
}

std::vector<std::string> CommandAsr::transcribe(const at::Tensor& samples,
                                                std::span<const std::int64_t> lengths) {
  static std::atomic<unsigned> counter{0};
  std::vector<std::string> out;
  const auto dir = std::filesystem::temp_directory_path();
  for (std::size_t b = 0; b < lengths.size(); ++b) {
    auto w = from_tensor(samples[static_cast<std::int64_t>(b)].narrow(0, 0, lengths[b]));
    const auto path = dir / ("camo_ext_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".wav");
    write_wav(path, w);
    const std::string cmd = command_ + " '" + path.string() + "'";
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(::popen(cmd.c_str(), "r"), ::pclose);
    if (!pipe) {
      std::filesystem::remove(path);
      throw std::runtime_error("external ASR: cannot run '" + command_ + "'");
    }
    std::string text;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe.get())) text.append(buf, n);
    pipe.reset();
    std::filesystem::remove(path);
    out.push_back(normalize_text(text));
  }
  return out;
}

}  // namespace camo
