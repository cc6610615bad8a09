// src/asr/lm.cpp

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

#include "camo/asr/lm.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "camo/asr/alphabet.hpp"
#include "camo/core/error.hpp"

namespace camo {

int CharNgramLm::Node::distinct() const {
  return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
}

CharNgramLm::CharNgramLm(int order) : order_(order) {
  if (order < 1) throw DomainError("lm: order must be >= 1");
}

int CharNgramLm::slot(char c) {
  // alphabet indices 1..28 -> 0..27
  return Alphabet::index(c) - 1;
}

std::string CharNgramLm::padded_context(std::string_view history, int length) const {
  std::string ctx;
  ctx.reserve(static_cast<std::size_t>(length));
  const auto have = static_cast<int>(history.size());
  for (int i = have - length; i < have; ++i) ctx.push_back(i < 0 ? kBos : history[static_cast<std::size_t>(i)]);
  return ctx;
}

void CharNgramLm::train(const std::vector<std::string>& sentences) {
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const int k = slot(s[i]);
      const std::string_view history(s.data(), i);
      for (int n = 0; n < order_; ++n) {
        auto& node = nodes_[padded_context(history, n)];
        node.total += 1;
        node.counts[static_cast<std::size_t>(k)] += 1;
      }
    }
  }
}

double CharNgramLm::log_prob(std::string_view history, char next) const {
  const int k = slot(next);
  double p = 1.0 / kVocab;
  for (int n = 0; n < order_; ++n) {
    auto it = nodes_.find(padded_context(history, n));
    if (it == nodes_.end() || it->second.total == 0) break;
    const auto& node = it->second;
    const double t = node.distinct();
    p = (node.counts[static_cast<std::size_t>(k)] + t * p) / (node.total + t);
  }
  return std::log(p);
}

double CharNgramLm::score(std::string_view text) const {
  double s = 0.0;
  for (std::size_t i = 0; i < text.size(); ++i) s += log_prob(text.substr(0, i), text[i]);
  return s;
}

nlohmann::json CharNgramLm::to_json() const {
  nlohmann::json contexts = nlohmann::json::object();
  std::vector<std::string> keys;
  keys.reserve(nodes_.size());
  for (const auto& [key, node] : nodes_) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  for (const auto& key : keys) contexts[key] = nodes_.at(key).counts;
  return {{"kind", "char_ngram_witten_bell"}, {"order", order_}, {"contexts", contexts}};
}

CharNgramLm CharNgramLm::from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "char_ngram_witten_bell") throw FormatError("lm: unknown kind");
  CharNgramLm lm(j.at("order").get<int>());
  for (const auto& [key, counts] : j.at("contexts").items()) {
    Node node;
    node.counts = counts.get<std::array<std::uint32_t, kVocab>>();
    for (auto c : node.counts) node.total += c;
    lm.nodes_[key] = node;
  }
  return lm;
}

}  // namespace camo
