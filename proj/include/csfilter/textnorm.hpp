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
#include <string>
#include <string_view>
#include <vector>

namespace csfilter {

struct NormConfig {
  // NFKC with case folding when true, plain NFKC otherwise.
  bool casefold = true;
  bool strip_punctuation = true;
  // Not supported; rejected by validate() when set.
  bool traditional_to_simplified = false;

  void validate() const;
};

/// Unicode-compatibility normalization, case folding, punctuation and symbol
/// removal (apostrophes between Latin letters survive), whitespace collapse.
/// Total and idempotent.
std::string normalize(std::string_view text, const NormConfig& cfg = {});

/// Surface form of an inline timestamp token, parsed from a template with a
/// single `{}` or `{:.Nf}` placeholder, e.g. "<|{:.2f}|>".
class TimestampFormat {
 public:
  TimestampFormat();  // "<|{:.2f}|>"
  static TimestampFormat parse(std::string_view tpl);

  std::string format(double seconds) const;
  /// Removes every substring prefix + number + suffix; leaves the rest byte-identical.
  std::string strip(std::string_view text) const;
  const std::string& pattern() const { return pattern_; }

 private:
  std::string pattern_;
  std::string prefix_;
  std::string suffix_;
  int precision_ = 2;
};

std::string strip_timestamps(std::string_view text, std::string_view tpl);

enum class TokenKind { cjk_char, latin_word, numeric, timestamp, other };
enum class Language { mandarin, english, other };

Language language_of(TokenKind kind);
const char* to_string(TokenKind kind);
const char* to_string(Language lang);

struct Token {
  std::string surface;
  TokenKind kind = TokenKind::other;

  bool operator==(const Token& o) const { return surface == o.surface; }
};

struct TokenSequence {
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::vector<Language> languages() const;
  bool operator==(const TokenSequence&) const = default;
};

/// Splits normalized text into CJK characters, Latin words and digit runs;
/// everything else is dropped.
TokenSequence tokenize_mixed(std::string_view text);

/// Settings shared by every comparison that turns raw transcripts into tokens.
struct TextConfig {
  TimestampFormat timestamps;
  NormConfig norm;
};

/// strip_timestamps -> normalize -> tokenize_mixed.
TokenSequence prepare_tokens(std::string_view raw, const TextConfig& cfg);

// UTF-8 helpers shared with other modules.
std::vector<char32_t> decode_utf8(std::string_view text);
void append_utf8(std::string& out, char32_t cp);

}  // namespace csfilter
