// src/data/synth.cpp

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

#include "camo/data/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "camo/asr/alphabet.hpp"
#include "camo/core/error.hpp"
#include "camo/core/rng.hpp"

namespace camo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct LetterSound {
  bool voiced = true;
  double f1 = 0.0, f2 = 0.0;  // formants (voiced) or band centre (f1, unvoiced)
  double bandwidth = 0.0;     // unvoiced band width
  bool burst = false;
  double gain = 1.0;
};

const std::array<LetterSound, 26>& letter_table() {
  static const std::array<LetterSound, 26> table = [] {
    std::array<LetterSound, 26> t{};
    auto voiced = [&](char c, double f1, double f2, double gain = 1.0) {
      t[static_cast<std::size_t>(c - 'a')] = {true, f1, f2, 0.0, false, gain};
    };
    auto noise = [&](char c, double centre, double bw, bool burst, double gain = 0.6) {
      t[static_cast<std::size_t>(c - 'a')] = {false, centre, 0.0, bw, burst, gain};
    };
    voiced('a', 750, 1300);
    voiced('e', 450, 2100);
    voiced('i', 300, 2500);
    voiced('o', 600, 900);
    voiced('u', 300, 900);
    voiced('y', 450, 2500);
    voiced('b', 300, 1300, 0.7);
    voiced('d', 450, 1700, 0.7);
    voiced('g', 600, 1700, 0.7);
    voiced('j', 750, 2100, 0.7);
    voiced('l', 450, 1300, 0.8);
    voiced('m', 300, 1700, 0.6);
    voiced('n', 600, 2100, 0.6);
    voiced('r', 750, 1700, 0.8);
    voiced('v', 900, 1300, 0.7);
    voiced('w', 450, 900, 0.8);
    voiced('z', 900, 2100, 0.7);
    noise('c', 2600, 500, false);
    noise('f', 3200, 500, false);
    noise('h', 1600, 600, false, 0.4);
    noise('k', 3800, 500, true);
    noise('p', 4400, 500, true);
    noise('q', 5000, 500, true);
    noise('s', 5600, 500, false);
    noise('t', 6200, 500, true);
    noise('x', 6800, 500, false);
    return t;
  }();
  return table;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Raised-cosine fade in/out of `ramp` samples.
double envelope(std::size_t i, std::size_t n, std::size_t ramp) {
  if (i < ramp) return 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / ramp);
  if (i + ramp >= n) return 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(n - 1 - i) / ramp);
  return 1.0;
}

void render_letter(char c, const SpeakerProfile& spk, std::mt19937_64& rng, std::vector<float>& out) {
  const auto& snd = letter_table()[static_cast<std::size_t>(c - 'a')];
  const double dur = 0.09 * spk.rate * uniform(rng, 0.85, 1.15);
  const auto n = static_cast<std::size_t>(dur * kSampleRate);
  const std::size_t ramp = static_cast<std::size_t>(0.012 * kSampleRate);
  std::vector<double> buf(n, 0.0);

  if (snd.voiced) {
    const double f0 = spk.f0 * uniform(rng, 0.97, 1.03);
    const double glide = uniform(rng, -0.04, 0.04);  // slight pitch movement across the token
    const double f1 = snd.f1 * spk.formant_scale, f2 = snd.f2 * spk.formant_scale;
    const double bw = 110.0;
    for (int h = 1; h * f0 < 4800.0; ++h) {
      const double f = h * f0;
      const double amp = std::exp(-0.5 * std::pow((f - f1) / bw, 2)) +
                         0.7 * std::exp(-0.5 * std::pow((f - f2) / bw, 2));
      if (amp < 0.01) continue;
      double phase = uniform(rng, 0.0, kTwoPi);
      for (std::size_t i = 0; i < n; ++i) {
        const double frac = static_cast<double>(i) / n;
        phase += kTwoPi * f * (1.0 + glide * frac) / kSampleRate;
        buf[i] += amp * std::sin(phase);
      }
    }
  } else {
    const double lo = snd.f1 - snd.bandwidth / 2, hi = snd.f1 + snd.bandwidth / 2;
    for (double f = lo; f <= hi; f += 25.0) {
      const double fj = f + uniform(rng, -10.0, 10.0);
      const double ph = uniform(rng, 0.0, kTwoPi);
      for (std::size_t i = 0; i < n; ++i) buf[i] += 0.35 * std::sin(ph + kTwoPi * fj * i / kSampleRate);
    }
    if (snd.burst) {
      std::normal_distribution<double> g(0.0, 1.0);
      const auto nb = std::min<std::size_t>(n, static_cast<std::size_t>(0.012 * kSampleRate));
      for (std::size_t i = 0; i < nb; ++i) buf[i] += 1.5 * g(rng) * (1.0 - static_cast<double>(i) / nb);
    }
  }
  double rms = 0.0;
  for (double v : buf) rms += v * v;
  rms = std::sqrt(rms / std::max<std::size_t>(1, n));
  const double scale = rms > 0 ? snd.gain * 0.25 / rms : 0.0;
  for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<float>(scale * buf[i] * envelope(i, n, ramp)));
}

void append_silence(std::vector<float>& out, double seconds) {
  out.insert(out.end(), static_cast<std::size_t>(seconds * kSampleRate), 0.0f);
}

}  // namespace

std::vector<std::string> default_vocabulary() {
  return {"go",     "up",      "on",       "no",        "yes",       "red",     "cat",    "dog",
          "sun",    "the",     "and",      "our",       "they",      "held",    "blue",   "fish",
          "tree",   "book",    "often",    "green",     "water",     "happy",   "little", "garden",
          "window", "morning", "yellow",   "family",    "orange",    "people",  "between", "question",
          "together", "remember", "important", "beautiful", "jump",   "quiz",    "box",    "very"};
}

std::vector<SpeakerProfile> make_speakers(int count, std::uint64_t seed, double formant_spread, double rate_spread) {
  std::mt19937_64 rng(derive_seed(seed, "speakers"));
  std::vector<SpeakerProfile> out;
  for (int i = 0; i < count; ++i) {
    SpeakerProfile s;
    s.id = "spk" + std::to_string(i);
    s.f0 = uniform(rng, 90.0, 170.0);
    s.formant_scale = uniform(rng, 1.0 - formant_spread, 1.0 + formant_spread);
    s.rate = uniform(rng, 1.0 - rate_spread, 1.0 + rate_spread);
    out.push_back(s);
  }
  return out;
}

Waveform render_text(const std::string& text, const SpeakerProfile& speaker, std::mt19937_64& rng) {
  std::vector<float> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == ' ') {
      append_silence(out, uniform(rng, 0.12, 0.22) * speaker.rate);
    } else if (c >= 'a' && c <= 'z') {
      render_letter(c, speaker, rng, out);
      if (i + 1 < text.size() && text[i + 1] != ' ') append_silence(out, 0.015);
    } else {
      throw DomainError(std::string("synth: cannot render '") + c + "'");
    }
  }
  return Waveform(std::move(out));
}

Dataset synthesize_corpus(const SynthConfig& cfg, const std::string& id_prefix) {
  if (cfg.num_utterances < 0 || cfg.num_speakers < 1) throw DomainError("synth: bad corpus size");
  if (!(cfg.min_duration > 0 && cfg.max_duration >= cfg.min_duration))
    throw DomainError("synth: bad duration range");
  const auto vocab = cfg.vocabulary.empty() ? default_vocabulary() : cfg.vocabulary;
  const auto speakers = make_speakers(cfg.num_speakers, cfg.seed, cfg.formant_spread, cfg.rate_spread);

  Dataset out;
  out.reserve(static_cast<std::size_t>(cfg.num_utterances));
  for (int u = 0; u < cfg.num_utterances; ++u) {
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(u)));
    const auto& spk = speakers[static_cast<std::size_t>(u) % speakers.size()];
    const double target = uniform(rng, cfg.min_duration, cfg.max_duration);
    const auto target_n = static_cast<std::size_t>(target * kSampleRate);

    std::vector<float> audio;
    append_silence(audio, uniform(rng, 0.15, 0.4));
    std::string text;
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    for (int attempt = 0; attempt < 64; ++attempt) {
      const auto& word = vocab[pick(rng)];
      auto piece = render_text(word, spk, rng).samples;
      const auto pause = static_cast<std::size_t>(uniform(rng, 0.12, 0.22) * spk.rate * kSampleRate);
      const std::size_t need = audio.size() + (text.empty() ? 0 : pause) + piece.size() +
                               static_cast<std::size_t>(0.15 * kSampleRate);
      if (need > target_n) {
        if (!text.empty()) break;
        continue;
      }
      if (!text.empty()) {
        audio.insert(audio.end(), pause, 0.0f);
        text.push_back(' ');
      }
      audio.insert(audio.end(), piece.begin(), piece.end());
      text += word;
    }
    if (text.empty()) throw DomainError("synth: duration range too short for any word");
    audio.resize(target_n, 0.0f);

    // level and background noise
    Waveform w(std::move(audio));
    const float pk = w.peak();
    const double peak = uniform(rng, cfg.peak_min, cfg.peak_max);
    const double noise = uniform(rng, cfg.noise_min, cfg.noise_max) * peak;
    std::normal_distribution<double> g(0.0, 1.0);
    for (float& s : w.samples) {
      const double v = (pk > 0 ? s * (peak / pk) : 0.0) + noise * g(rng);
      s = static_cast<float>(std::clamp(v, -1.0, 1.0));
    }
    out.push_back({id_prefix + std::to_string(u), std::move(w), text, spk.id});
  }
  return out;
}

}  // namespace camo
