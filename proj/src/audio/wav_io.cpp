// src/audio/wav_io.cpp

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

#include "camo/audio/wav_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <numbers>

#include "camo/core/error.hpp"

namespace camo {

namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t read_u16(const unsigned char* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

void put_u32(std::ofstream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}
void put_u16(std::ofstream& os, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

double kaiser(double x, double beta) {
  // x in [-1, 1]
  if (std::fabs(x) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - x * x)) / std::cyl_bessel_i(0.0, beta);
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path, IngestInfo* info, int target_rate) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw FormatError("'" + path.string() + "' is not a RIFF/WAVE file");

  int channels = 0, rate = 0, bits = 0, format = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t len = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + len > bytes.size() && std::memcmp(chunk, "data", 4) != 0)
      throw FormatError("'" + path.string() + "': truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16) throw FormatError("'" + path.string() + "': short fmt chunk");
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = static_cast<int>(read_u32(chunk + 12));
      bits = read_u16(chunk + 22);
      if (format == 0xFFFE && len >= 40) format = read_u16(chunk + 8 + 24);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = std::min<std::size_t>(len, bytes.size() - body);
    }
    pos = body + len + (len & 1u);
  }
  if (format != 1 || bits != 16)
    throw FormatError("'" + path.string() + "': only 16-bit PCM is supported");
  if (channels != 1) throw FormatError("'" + path.string() + "': expected mono audio");
  if (!data) throw FormatError("'" + path.string() + "': no data chunk");
  if (rate <= 0) throw FormatError("'" + path.string() + "': bad sample rate");

  Waveform w;
  w.sample_rate = rate;
  w.samples.resize(data_len / 2);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const auto v = static_cast<std::int16_t>(read_u16(data + 2 * i));
    w.samples[i] = static_cast<float>(v) / 32768.0f;
  }
  if (info) *info = IngestInfo{rate, false};
  if (target_rate > 0 && rate != target_rate) {
    w = resample(w, target_rate);
    if (info) info->resampled = true;
  }
  return w;
}

void write_wav(const std::filesystem::path& path, const Waveform& w) {
  if (w.sample_rate <= 0) throw DomainError("write_wav: bad sample rate");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write '" + path.string() + "'");
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  os.write("RIFF", 4);
  put_u32(os, 36 + 2 * n);
  os.write("WAVEfmt ", 8);
  put_u32(os, 16);
  put_u16(os, 1);
  put_u16(os, 1);
  put_u32(os, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(os, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(os, 2);
  put_u16(os, 16);
  os.write("data", 4);
  put_u32(os, 2 * n);
  for (float s : w.samples) {
    const double v = std::clamp(std::nearbyint(static_cast<double>(s) * 32768.0), -32768.0, 32767.0);
    put_u16(os, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  if (!os) throw FormatError("write failed for '" + path.string() + "'");
}

Waveform resample(const Waveform& w, int target_rate) {
  if (target_rate <= 0 || w.sample_rate <= 0) throw DomainError("resample: rates must be positive");
  if (target_rate == w.sample_rate) return w;
  const int g = std::gcd(target_rate, w.sample_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = w.sample_rate / g;
  const std::int64_t factor = std::max(up, down);
  const double cutoff = 0.5 / static_cast<double>(factor);  // cycles per upsampled sample
  constexpr int kZeroCrossings = 16;
  constexpr double kBeta = 8.6;
  const std::int64_t half = kZeroCrossings * factor;

  // Prototype low-pass at the upsampled rate; gain of up undoes zero-stuffing.
  std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
  for (std::int64_t k = -half; k <= half; ++k) {
    const double x = 2.0 * cutoff * static_cast<double>(k);
    const double sinc = k == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    h[static_cast<std::size_t>(k + half)] =
        static_cast<double>(up) * 2.0 * cutoff * sinc * kaiser(static_cast<double>(k) / half, kBeta);
  }

  const std::int64_t n_in = w.size();
  const std::int64_t n_out = (n_in * up + down - 1) / down;
  Waveform out = Waveform::zeros(n_out, target_rate);
  for (std::int64_t n = 0; n < n_out; ++n) {
    const std::int64_t p = n * down;  // position on the upsampled grid
    // input index i contributes when |p - i*up| <= half
    std::int64_t i_lo = (p - half + up - 1) / up;
    if (p - half < 0) i_lo = 0;
    const std::int64_t i_hi = std::min<std::int64_t>(n_in - 1, (p + half) / up);
    double acc = 0.0;
    for (std::int64_t i = std::max<std::int64_t>(0, i_lo); i <= i_hi; ++i)
      acc += h[static_cast<std::size_t>(p - i * up + half)] * w.samples[static_cast<std::size_t>(i)];
    out.samples[static_cast<std::size_t>(n)] = static_cast<float>(acc);
  }
  return out;
}

}  // namespace camo
