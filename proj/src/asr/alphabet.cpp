// src/asr/alphabet.cpp

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

#include "camo/asr/alphabet.hpp"

#include <cctype>

#include "camo/core/error.hpp"

namespace camo {

bool Alphabet::contains(char c) { return (c >= 'a' && c <= 'z') || c == ' ' || c == '\''; }

int Alphabet::index(char c) {
  if (c >= 'a' && c <= 'z') return 1 + (c - 'a');
  if (c == ' ') return kSpace;
  if (c == '\'') return kApostrophe;
  throw DomainError(std::string("character '") + c + "' is not in the alphabet");
}

char Alphabet::symbol(int index) {
  if (index <= 0 || index >= kSize) throw DomainError("label index out of range (or blank)");
  return kSymbols[static_cast<std::size_t>(index)];
}

std::vector<int> Alphabet::encode(std::string_view text) {
  std::vector<int> out;
  out.reserve(text.size());
  for (char c : text) out.push_back(index(c));
  return out;
}

std::string Alphabet::decode(const std::vector<int>& labels) {
  std::string out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(symbol(l));
  return out;
}

std::string normalize_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char ch : raw) {
    const auto u = static_cast<unsigned char>(ch);
    char c = static_cast<char>(std::tolower(u));
    if ((c >= 'a' && c <= 'z') || c == '\'') {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    } else if (std::isspace(u)) {
      pending_space = true;
    } else if (std::ispunct(u)) {
      // stripped: "don't." -> "don't", "well-known" -> "wellknown"
    } else {
      pending_space = true;
    }
  }
  return out;
}

bool is_valid_transcript(std::string_view text) {
  if (text.empty()) return true;
  if (text.front() == ' ' || text.back() == ' ') return false;
  char prev = 0;
  for (char c : text) {
    if (!Alphabet::contains(c)) return false;
    if (c == ' ' && prev == ' ') return false;
    prev = c;
  }
  return true;
}

Transcript::Transcript(std::string text) : text_(std::move(text)) {
  if (!is_valid_transcript(text_)) throw DomainError("invalid transcript: '" + text_ + "'");
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t start = 0;
  while (start < text.size()) {
    while (start < text.size() && text[start] == ' ') ++start;
    if (start >= text.size()) break;
    std::size_t end = text.find(' ', start);
    if (end == std::string_view::npos) end = text.size();
    words.emplace_back(text.substr(start, end - start));
    start = end;
  }
  return words;
}

std::vector<std::string> Transcript::words() const { return split_words(text_); }

}  // namespace camo
