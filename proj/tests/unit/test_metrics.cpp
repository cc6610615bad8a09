// tests/unit/test_metrics.cpp

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

#include <random>
#include <string>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "camo/core/error.hpp"
#include "camo/eval/metrics.hpp"

namespace camo {
namespace {

TEST(Wer, IdenticalIsZero) { EXPECT_EQ(wer("the cat sat", "the cat sat").rate, 0.0); }

TEST(Wer, OneDeletion) {
  auto r = wer("a b c", "a c");
  EXPECT_EQ(r.counts.deletions, 1);
  EXPECT_EQ(r.counts.substitutions, 0);
  EXPECT_EQ(r.counts.insertions, 0);
  EXPECT_DOUBLE_EQ(r.rate, 1.0 / 3.0);
}

TEST(Wer, EmptyHypothesisDeletesEverything) {
  auto r = wer("one two three four", "");
  EXPECT_EQ(r.counts.deletions, 4);
  EXPECT_EQ(r.rate, 1.0);
}

TEST(Wer, EmptyReferenceThrows) { EXPECT_THROW(wer("", "a"), DomainError); }

TEST(Cer, Identical) { EXPECT_EQ(cer("abc", "abc").rate, 0.0); }

TEST(Cer, SubstitutionAndInsertion) {
  auto r = cer("abc", "axcd");
  EXPECT_EQ(r.counts.substitutions, 1);
  EXPECT_EQ(r.counts.insertions, 1);
  EXPECT_EQ(r.counts.deletions, 0);
  EXPECT_DOUBLE_EQ(r.rate, 2.0 / 3.0);
}

TEST(Cer, EmptyHypothesis) { EXPECT_EQ(cer("abcde", "").rate, 1.0); }

TEST(Cer, SpacesCount) { EXPECT_DOUBLE_EQ(cer("a b", "ab").rate, 1.0 / 3.0); }

TEST(Align, MatchesExhaustiveEnumeration) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(0, 6), sym(0, 3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<int> a(len(rng)), b(len(rng));
    for (auto& x : a) x = sym(rng);
    for (auto& x : b) x = sym(rng);
    const auto want = oracle::enumerate_edits(a, b);
    const auto got = align_tokens(a, b).counts;
    ASSERT_EQ(got.edits(), want.edits);
    ASSERT_EQ(got.substitutions, want.subs);
    ASSERT_EQ(got.deletions, want.dels);
    ASSERT_EQ(got.insertions, want.ins);
  }
}

TEST(Align, PairsReplayTheEdits) {
  std::vector<int> ref{1, 2, 3, 4}, hyp{1, 3, 3, 5, 6};
  auto al = align_tokens(ref, hyp);
  int r = 0, h = 0;
  for (const auto& p : al.pairs) {
    if (p.op != EditOp::kInsert) EXPECT_EQ(p.ref_index, r++);
    if (p.op != EditOp::kDelete) EXPECT_EQ(p.hyp_index, h++);
    if (p.op == EditOp::kMatch) EXPECT_EQ(ref[p.ref_index], hyp[p.hyp_index]);
  }
  EXPECT_EQ(r, 4);
  EXPECT_EQ(h, 5);
}

TEST(Wer, InvariantToRelabeling) {
  auto a = wer("red blue red green", "blue blue green red");
  auto b = wer("cat dog cat fish", "dog dog fish cat");
  EXPECT_EQ(a.counts.substitutions, b.counts.substitutions);
  EXPECT_EQ(a.counts.deletions, b.counts.deletions);
  EXPECT_EQ(a.counts.insertions, b.counts.insertions);
}

TEST(CorpusErrors, PoolsCounts) {
  CorpusErrors c;
  c.add("a b", "a");      // 1 / 2
  c.add("c d e f", "c d e f");  // 0 / 4
  EXPECT_DOUBLE_EQ(c.wer(), 1.0 / 6.0);
  EXPECT_EQ(c.words.reference_length, 6);
}

}  // namespace
}  // namespace camo
