// Copyright 2026 The csfilter Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "csfilter/textnorm.hpp"

namespace csfilter {

enum class LexiconFormat { tsv };
enum class LexiconKind { english, mandarin };

/// Key -> pronunciation table loaded from "key<TAB>value" lines.
struct PronunciationTable {
  std::unordered_map<std::string, std::vector<std::string>> entries;
  std::size_t lines_read = 0;
  std::size_t duplicates = 0;  // later lines for an existing key, ignored

  const std::vector<std::string>* find(const std::string& key) const;
  std::size_t size() const { return entries.size(); }
};

/// English words map to ARPAbet-style phoneme lists, Mandarin characters to a
/// single pinyin syllable with tone digit.
struct Lexicon {
  PronunciationTable english;
  PronunciationTable mandarin;
  std::string name;
  std::string version;
};

/// Parses a TSV lexicon. The first entry for a key wins. Blank lines and lines
/// starting with '#' are skipped; anything else without a key and a value is a
/// ParseError carrying the line number. Mandarin values must look like
/// [a-z]+[1-5].
PronunciationTable load_lexicon(std::istream& in, LexiconFormat format, LexiconKind kind);

Lexicon load_lexicon_files(const std::filesystem::path& english, const std::filesystem::path& mandarin);

/// Paths of the small lexicons bundled for tests and synthetic corpora.
std::filesystem::path bundled_english_lexicon();
std::filesystem::path bundled_mandarin_lexicon();

struct PhonemizeConfig {
  bool keep_tones = true;
};

struct PhonemeSequence {
  std::vector<std::string> phonemes;

  std::size_t size() const { return phonemes.size(); }
  bool empty() const { return phonemes.empty(); }
  bool operator==(const PhonemeSequence&) const = default;
};

/// Letter-name pronunciation used for out-of-vocabulary Latin words.
const std::vector<std::string>& letter_phonemes(char letter);
/// Digit-name pronunciation used for numeric tokens.
const std::vector<std::string>& digit_phonemes(char digit);

/// Total: unknown characters fall back to letter or digit names, or to the
/// surface itself when no fallback exists.
PhonemeSequence phonemize(const TokenSequence& seq, const Lexicon& lex, const PhonemizeConfig& cfg = {});

}  // namespace csfilter
