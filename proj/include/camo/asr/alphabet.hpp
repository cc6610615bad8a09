// camo/asr/alphabet.hpp

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
#include <string>
#include <string_view>
#include <vector>

namespace camo {

/// CTC label set: index 0 is the blank, then a-z, space, apostrophe.
class Alphabet {
 public:
  static constexpr int kBlank = 0;
  static constexpr int kSize = 29;
  static constexpr int kSpace = 27;
  static constexpr int kApostrophe = 28;

  /// Symbols in index order, '_' standing in for the blank.
  static constexpr std::string_view kSymbols = "_abcdefghijklmnopqrstuvwxyz '";

  static bool contains(char c);
  /// Throws DomainError for characters outside the alphabet.
  static int index(char c);
  static char symbol(int index);

  static std::vector<int> encode(std::string_view text);
  static std::string decode(const std::vector<int>& labels);
};

/// Lowercases, strips punctuation other than apostrophes, maps every other
/// non-alphabet character to whitespace, collapses whitespace and trims.
std::string normalize_text(std::string_view raw);

/// Transcript over the alphabet, with no leading/trailing or repeated spaces.
class Transcript {
 public:
  Transcript() = default;
  /// Validates (does not normalize); throws DomainError if invalid.
  explicit Transcript(std::string text);
  static Transcript normalized(std::string_view raw) { return Transcript(normalize_text(raw)); }

  const std::string& text() const { return text_; }
  bool empty() const { return text_.empty(); }
  std::vector<int> labels() const { return Alphabet::encode(text_); }
  std::vector<std::string> words() const;

  friend bool operator==(const Transcript&, const Transcript&) = default;

 private:
  std::string text_;
};

bool is_valid_transcript(std::string_view text);

/// Splits on single spaces (the text is assumed normalized).
std::vector<std::string> split_words(std::string_view text);

}  // namespace camo
