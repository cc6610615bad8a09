// camo/core/rng.hpp

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
#include <string_view>

namespace camo {

// splitmix64 finalizer.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent, reproducible seed for a named component from the
/// run's root seed. All randomness in a run flows through here.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::string_view component) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : component) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix_seed(root ^ mix_seed(h));
}

constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix_seed(root ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

}  // namespace camo
