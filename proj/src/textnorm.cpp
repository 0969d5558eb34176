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

#include "csfilter/textnorm.hpp"

#include <cstdio>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "csfilter/error.hpp"

namespace csfilter {

namespace {

const icu::Normalizer2& normalizer(bool casefold) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n =
      casefold ? icu::Normalizer2::getNFKCCasefoldInstance(status) : icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status) || n == nullptr) throw Error(std::string("ICU normalizer unavailable: ") + u_errorName(status));
  return *n;
}

bool is_apostrophe(UChar32 c) { return c == 0x0027 || c == 0x2019; }

bool is_latin_letter(UChar32 c) {
  if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  UErrorCode status = U_ZERO_ERROR;
  return u_isalpha(c) && uscript_getScript(c, &status) == USCRIPT_LATIN;
}

bool is_cjk(UChar32 c) {
  if (c < 0x2E80) return false;
  UErrorCode status = U_ZERO_ERROR;
  switch (uscript_getScript(c, &status)) {
    case USCRIPT_HAN:
    case USCRIPT_HIRAGANA:
    case USCRIPT_KATAKANA:
    case USCRIPT_HANGUL:
    case USCRIPT_BOPOMOFO:
      return u_isalpha(c) || u_hasBinaryProperty(c, UCHAR_IDEOGRAPHIC);
    default:
      return false;
  }
}

bool is_digit(UChar32 c) {
  if (c < 0x80) return c >= '0' && c <= '9';
  return u_isdigit(c);
}

bool is_punct_or_symbol(UChar32 c) { return (U_GET_GC_MASK(c) & (U_GC_P_MASK | U_GC_S_MASK)) != 0; }

bool is_space_like(UChar32 c) { return u_isUWhiteSpace(c) || u_charType(c) == U_CONTROL_CHAR; }

}  // namespace

std::vector<char32_t> decode_utf8(std::string_view text) {
  std::vector<char32_t> out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  int32_t i = 0;
  const auto n = static_cast<int32_t>(text.size());
  while (i < n) {
    UChar32 c;
    U8_NEXT_OR_FFFD(s, i, n, c);
    out.push_back(static_cast<char32_t>(c));
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  uint8_t buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool err = false;
  U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(cp), err);
  if (err) {
    out += "\xEF\xBF\xBD";
    return;
  }
  out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
}

void NormConfig::validate() const {
  if (traditional_to_simplified) {
    throw ValidationError("norm.traditional_to_simplified is not supported");
  }
}

std::string normalize(std::string_view text, const NormConfig& cfg) {
  if (text.empty()) return {};
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString folded = normalizer(cfg.casefold).normalize(u, status);
  if (U_FAILURE(status)) throw Error(std::string("normalization failed: ") + u_errorName(status));

  std::vector<UChar32> cps;
  cps.reserve(static_cast<std::size_t>(folded.length()));
  for (int32_t i = 0; i < folded.length(); i = folded.moveIndex32(i, 1)) cps.push_back(folded.char32At(i));

  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  auto emit = [&](UChar32 c) {
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    append_utf8(out, static_cast<char32_t>(c));
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const UChar32 c = cps[i];
    if (is_space_like(c)) {
      pending_space = true;
    } else if (is_apostrophe(c) && i > 0 && i + 1 < cps.size() && is_latin_letter(cps[i - 1]) &&
               is_latin_letter(cps[i + 1])) {
      emit('\'');
    } else if (cfg.strip_punctuation && is_punct_or_symbol(c)) {
      pending_space = true;
    } else {
      emit(c);
    }
  }
  return out;
}

TimestampFormat::TimestampFormat() : pattern_("<|{:.2f}|>"), prefix_("<|"), suffix_("|>"), precision_(2) {}

TimestampFormat TimestampFormat::parse(std::string_view tpl) {
  const auto open = tpl.find('{');
  const auto close = open == std::string_view::npos ? open : tpl.find('}', open);
  if (open == std::string_view::npos || close == std::string_view::npos) {
    throw ValidationError("timestamp format \"" + std::string(tpl) + "\" has no {} placeholder");
  }
  if (tpl.find('{', close) != std::string_view::npos) {
    throw ValidationError("timestamp format \"" + std::string(tpl) + "\" has more than one placeholder");
  }
  TimestampFormat f;
  f.pattern_ = std::string(tpl);
  f.prefix_ = std::string(tpl.substr(0, open));
  f.suffix_ = std::string(tpl.substr(close + 1));
  const auto spec = tpl.substr(open + 1, close - open - 1);
  if (spec.empty()) {
    f.precision_ = 2;
  } else if (spec.size() >= 4 && spec.substr(0, 2) == ":." && spec.back() == 'f') {
    int p = 0;
    for (char ch : spec.substr(2, spec.size() - 3)) {
      if (ch < '0' || ch > '9') throw ValidationError("bad timestamp precision in \"" + std::string(tpl) + "\"");
      p = p * 10 + (ch - '0');
    }
    if (p > 6) throw ValidationError("timestamp precision above 6 in \"" + std::string(tpl) + "\"");
    f.precision_ = p;
  } else {
    throw ValidationError("unsupported timestamp placeholder in \"" + std::string(tpl) + "\"");
  }
  if (f.prefix_.empty() && f.suffix_.empty()) {
    throw ValidationError("timestamp format needs literal text around the placeholder");
  }
  return f;
}

std::string TimestampFormat::format(double seconds) const {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision_, seconds);
  return prefix_ + buf + suffix_;
}

std::string TimestampFormat::strip(std::string_view text) const {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  auto digit = [&](std::size_t k) { return k < text.size() && text[k] >= '0' && text[k] <= '9'; };
  while (i < text.size()) {
    if (text.compare(i, prefix_.size(), prefix_) == 0) {
      std::size_t j = i + prefix_.size();
      if (digit(j)) {
        while (digit(j)) ++j;
        if (j < text.size() && text[j] == '.' && digit(j + 1)) {
          ++j;
          while (digit(j)) ++j;
        }
        if (text.compare(j, suffix_.size(), suffix_) == 0) {
          i = j + suffix_.size();
          continue;
        }
      }
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

std::string strip_timestamps(std::string_view text, std::string_view tpl) {
  return TimestampFormat::parse(tpl).strip(text);
}

Language language_of(TokenKind kind) {
  switch (kind) {
    case TokenKind::cjk_char:
      return Language::mandarin;
    case TokenKind::latin_word:
    case TokenKind::numeric:
      return Language::english;
    default:
      return Language::other;
  }
}

const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::cjk_char:
      return "cjk_char";
    case TokenKind::latin_word:
      return "latin_word";
    case TokenKind::numeric:
      return "numeric";
    case TokenKind::timestamp:
      return "timestamp";
    case TokenKind::other:
      break;
  }
  return "other";
}

const char* to_string(Language lang) {
  switch (lang) {
    case Language::mandarin:
      return "mandarin";
    case Language::english:
      return "english";
    case Language::other:
      break;
  }
  return "other";
}

std::vector<Language> TokenSequence::languages() const {
  std::vector<Language> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(language_of(t.kind));
  return out;
}

TokenSequence tokenize_mixed(std::string_view text) {
  TokenSequence seq;
  std::string run;
  TokenKind run_kind = TokenKind::other;

  auto flush = [&] {
    if (run_kind == TokenKind::latin_word) {
      while (!run.empty() && run.back() == '\'') run.pop_back();
    }
    if (!run.empty()) seq.tokens.push_back({std::move(run), run_kind});
    run.clear();
    run_kind = TokenKind::other;
  };

  for (char32_t cp : decode_utf8(text)) {
    const auto c = static_cast<UChar32>(cp);
    if (is_cjk(c)) {
      flush();
      std::string s;
      append_utf8(s, cp);
      seq.tokens.push_back({std::move(s), TokenKind::cjk_char});
    } else if (is_latin_letter(c)) {
      if (run_kind != TokenKind::latin_word) flush();
      run_kind = TokenKind::latin_word;
      append_utf8(run, cp);
    } else if (is_apostrophe(c) && run_kind == TokenKind::latin_word) {
      run.push_back('\'');
    } else if (is_digit(c)) {
      if (run_kind != TokenKind::numeric) flush();
      run_kind = TokenKind::numeric;
      append_utf8(run, cp);
    } else {
      flush();
    }
  }
  flush();
  return seq;
}

TokenSequence prepare_tokens(std::string_view raw, const TextConfig& cfg) {
  return tokenize_mixed(normalize(cfg.timestamps.strip(raw), cfg.norm));
}

}  // namespace csfilter
