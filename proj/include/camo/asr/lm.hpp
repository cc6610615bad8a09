// camo/asr/lm.hpp

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

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace camo {

/// Character n-gram language model with Witten-Bell interpolation down to a
/// uniform distribution over the 28 non-blank symbols. Every conditional
/// distribution sums to one.
class CharNgramLm {
 public:
  static constexpr int kVocab = 28;
  static constexpr char kBos = '^';

  explicit CharNgramLm(int order = 4);

  int order() const { return order_; }
  void train(const std::vector<std::string>& sentences);

  /// Natural-log P(next | history). `history` is the text emitted so far in
  /// the sentence; it is implicitly preceded by sentence-start padding.
  double log_prob(std::string_view history, char next) const;

  /// Sum of log_prob over every character of `text`.
  double score(std::string_view text) const;

  nlohmann::json to_json() const;
  static CharNgramLm from_json(const nlohmann::json& j);

 private:
  struct Node {
    std::uint32_t total = 0;
    std::array<std::uint32_t, kVocab> counts{};
    int distinct() const;
  };

  static int slot(char c);
  std::string padded_context(std::string_view history, int length) const;

  int order_;
  // key: context string (length 0 .. order-1, BOS-padded)
  std::unordered_map<std::string, Node> nodes_;
};

}  // namespace camo
