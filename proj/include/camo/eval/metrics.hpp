// camo/eval/metrics.hpp

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
#include <string>
#include <vector>

namespace camo {

struct ErrorCounts {
  std::int64_t substitutions = 0;
  std::int64_t deletions = 0;
  std::int64_t insertions = 0;
  std::int64_t reference_length = 0;

  std::int64_t edits() const { return substitutions + deletions + insertions; }
  /// (S + D + I) / N; 0 for an empty reference with no insertions.
  double rate() const;
  ErrorCounts& operator+=(const ErrorCounts& o);
};

enum class EditOp { kMatch, kSubstitute, kDelete, kInsert };

struct AlignedPair {
  EditOp op;
  int ref_index;  // -1 for insertions
  int hyp_index;  // -1 for deletions
};

struct Alignment {
  ErrorCounts counts;
  std::vector<AlignedPair> pairs;
};

/// Minimum-edit-distance alignment with unit costs. Among optimal
/// alignments the one with the most substitutions (fewest insert/delete
/// pairs) wins; remaining ties resolve match/sub, then delete, then insert
/// when walking back from the end.
Alignment align_tokens(const std::vector<int>& ref, const std::vector<int>& hyp);

struct ErrorRate {
  double rate = 0.0;
  ErrorCounts counts;
};

/// Word-level error over normalized transcripts. Empty reference throws.
ErrorRate wer(const std::string& ref, const std::string& hyp);
/// Character-level error (spaces count) over normalized transcripts.
ErrorRate cer(const std::string& ref, const std::string& hyp);

Alignment align_words(const std::string& ref, const std::string& hyp);

/// Pooled corpus rates: sum of edits over sum of reference lengths.
struct CorpusErrors {
  ErrorCounts words;
  ErrorCounts chars;
  void add(const std::string& ref, const std::string& hyp);
  double wer() const { return words.rate(); }
  double cer() const { return chars.rate(); }
};

}  // namespace camo
