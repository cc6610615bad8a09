// src/eval/metrics.cpp

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

#include "camo/eval/metrics.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "camo/asr/alphabet.hpp"
#include "camo/core/error.hpp"

namespace camo {

double ErrorCounts::rate() const {
  if (reference_length == 0) return edits() == 0 ? 0.0 : static_cast<double>(edits());
  return static_cast<double>(edits()) / static_cast<double>(reference_length);
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  reference_length += o.reference_length;
  return *this;
}

Alignment align_tokens(const std::vector<int>& ref, const std::vector<int>& hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  // cost = (edits, -substitutions), compared lexicographically
  using Cost = std::pair<int, int>;
  std::vector<Cost> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> Cost& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = {static_cast<int>(i), 0};
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = {static_cast<int>(j), 0};
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const bool same = ref[i - 1] == hyp[j - 1];
      Cost diag = at(i - 1, j - 1);
      if (!same) diag = {diag.first + 1, diag.second - 1};
      Cost del = {at(i - 1, j).first + 1, at(i - 1, j).second};
      Cost ins = {at(i, j - 1).first + 1, at(i, j - 1).second};
      at(i, j) = std::min({diag, del, ins});
    }
  }

  Alignment out;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      Cost diag = at(i - 1, j - 1);
      if (!same) diag = {diag.first + 1, diag.second - 1};
      if (diag == at(i, j)) {
        out.pairs.push_back({same ? EditOp::kMatch : EditOp::kSubstitute, static_cast<int>(i - 1),
                             static_cast<int>(j - 1)});
        if (!same) out.counts.substitutions++;
        --i, --j;
        continue;
      }
    }
    if (i > 0 && Cost{at(i - 1, j).first + 1, at(i - 1, j).second} == at(i, j)) {
      out.pairs.push_back({EditOp::kDelete, static_cast<int>(i - 1), -1});
      out.counts.deletions++;
      --i;
      continue;
    }
    out.pairs.push_back({EditOp::kInsert, -1, static_cast<int>(j - 1)});
    out.counts.insertions++;
    --j;
  }
  std::reverse(out.pairs.begin(), out.pairs.end());
  out.counts.reference_length = static_cast<std::int64_t>(n);
  return out;
}

namespace {

std::pair<std::vector<int>, std::vector<int>> intern_words(const std::string& ref, const std::string& hyp) {
  std::map<std::string, int> ids;
  auto map = [&](const std::string& s) {
    std::vector<int> out;
    for (const auto& w : split_words(s)) out.push_back(ids.emplace(w, static_cast<int>(ids.size())).first->second);
    return out;
  };
  auto r = map(ref);
  return {std::move(r), map(hyp)};
}

std::vector<int> chars_of(const std::string& s) {
  return {s.begin(), s.end()};
}

}  // namespace

Alignment align_words(const std::string& ref, const std::string& hyp) {
  auto [r, h] = intern_words(normalize_text(ref), normalize_text(hyp));
  return align_tokens(r, h);
}

ErrorRate wer(const std::string& ref, const std::string& hyp) {
  const auto nr = normalize_text(ref);
  if (nr.empty()) throw DomainError("wer: empty reference");
  auto a = align_words(nr, hyp);
  return {a.counts.rate(), a.counts};
}

ErrorRate cer(const std::string& ref, const std::string& hyp) {
  const auto nr = normalize_text(ref);
  if (nr.empty()) throw DomainError("cer: empty reference");
  auto a = align_tokens(chars_of(nr), chars_of(normalize_text(hyp)));
  return {a.counts.rate(), a.counts};
}

void CorpusErrors::add(const std::string& ref, const std::string& hyp) {
  words += camo::wer(ref, hyp).counts;
  chars += camo::cer(ref, hyp).counts;
}

}  // namespace camo
