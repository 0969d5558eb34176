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

#include "csfilter/phonemizer.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <sstream>

#include "csfilter/error.hpp"

namespace csfilter {

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_pinyin_syllable(const std::string& s) {
  if (s.size() < 2) return false;
  const char tone = s.back();
  if (tone < '1' || tone > '5') return false;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i] < 'a' || s[i] > 'z') return false;
  }
  return true;
}

std::vector<std::string> phones(std::initializer_list<const char*> p) { return {p.begin(), p.end()}; }

const std::array<std::vector<std::string>, 26>& letter_table() {
  static const std::array<std::vector<std::string>, 26> table = {
      phones({"EY"}),
      phones({"B", "IY"}),
      phones({"S", "IY"}),
      phones({"D", "IY"}),
      phones({"IY"}),
      phones({"EH", "F"}),
      phones({"JH", "IY"}),
      phones({"EY", "CH"}),
      phones({"AY"}),
      phones({"JH", "EY"}),
      phones({"K", "EY"}),
      phones({"EH", "L"}),
      phones({"EH", "M"}),
      phones({"EH", "N"}),
      phones({"OW"}),
      phones({"P", "IY"}),
      phones({"K", "Y", "UW"}),
      phones({"AA", "R"}),
      phones({"EH", "S"}),
      phones({"T", "IY"}),
      phones({"Y", "UW"}),
      phones({"V", "IY"}),
      phones({"D", "AH", "B", "AH", "L", "Y", "UW"}),
      phones({"EH", "K", "S"}),
      phones({"W", "AY"}),
      phones({"Z", "IY"}),
  };
  return table;
}

const std::array<std::vector<std::string>, 10>& digit_table() {
  static const std::array<std::vector<std::string>, 10> table = {
      phones({"Z", "IH", "R", "OW"}), phones({"W", "AH", "N"}),       phones({"T", "UW"}),
      phones({"TH", "R", "IY"}),      phones({"F", "AO", "R"}),       phones({"F", "AY", "V"}),
      phones({"S", "IH", "K", "S"}),  phones({"S", "EH", "V", "AH", "N"}), phones({"EY", "T"}),
      phones({"N", "AY", "N"}),
  };
  return table;
}

}  // namespace

const std::vector<std::string>* PronunciationTable::find(const std::string& key) const {
  auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

PronunciationTable load_lexicon(std::istream& in, LexiconFormat, LexiconKind kind) {
  PronunciationTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(lineno, "expected key<TAB>value");
    std::string key = trim(line.substr(0, tab));
    auto value = split_ws(line.substr(tab + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    if (value.empty()) throw ParseError(lineno, "empty pronunciation for \"" + key + "\"");
    if (kind == LexiconKind::mandarin && (value.size() != 1 || !is_pinyin_syllable(value.front()))) {
      throw ParseError(lineno, "\"" + key + "\" needs one pinyin syllable with tone digit");
    }
    ++table.lines_read;
    if (!table.entries.emplace(std::move(key), std::move(value)).second) ++table.duplicates;
  }
  if (in.bad()) throw IoError("failed reading lexicon stream");
  return table;
}

Lexicon load_lexicon_files(const std::filesystem::path& english, const std::filesystem::path& mandarin) {
  auto open = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open lexicon " + p.string());
    return in;
  };
  Lexicon lex;
  auto en = open(english);
  try {
    lex.english = load_lexicon(en, LexiconFormat::tsv, LexiconKind::english);
  } catch (const ParseError& e) {
    throw ValidationError(english.string() + ": " + e.what());
  }
  auto zh = open(mandarin);
  try {
    lex.mandarin = load_lexicon(zh, LexiconFormat::tsv, LexiconKind::mandarin);
  } catch (const ParseError& e) {
    throw ValidationError(mandarin.string() + ": " + e.what());
  }
  lex.name = english.filename().string() + "+" + mandarin.filename().string();
  lex.version = std::to_string(lex.english.size()) + "/" + std::to_string(lex.mandarin.size());
  return lex;
}

std::filesystem::path bundled_english_lexicon() {
  return std::filesystem::path(CSFILTER_DATA_DIR) / "lexicon" / "english_test.tsv";
}

std::filesystem::path bundled_mandarin_lexicon() {
  return std::filesystem::path(CSFILTER_DATA_DIR) / "lexicon" / "mandarin_test.tsv";
}

const std::vector<std::string>& letter_phonemes(char letter) {
  if (letter >= 'A' && letter <= 'Z') letter = static_cast<char>(letter - 'A' + 'a');
  if (letter < 'a' || letter > 'z') throw ValidationError("no letter-name pronunciation");
  return letter_table()[static_cast<std::size_t>(letter - 'a')];
}

const std::vector<std::string>& digit_phonemes(char digit) {
  if (digit < '0' || digit > '9') throw ValidationError("no digit-name pronunciation");
  return digit_table()[static_cast<std::size_t>(digit - '0')];
}

PhonemeSequence phonemize(const TokenSequence& seq, const Lexicon& lex, const PhonemizeConfig& cfg) {
  PhonemeSequence out;
  out.phonemes.reserve(seq.size() * 3);
  auto spell = [&](const std::string& surface) {
    for (char32_t cp : decode_utf8(surface)) {
      if (cp < 0x80 && ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'))) {
        for (const auto& p : letter_phonemes(static_cast<char>(cp))) out.phonemes.push_back(p);
      } else if (cp >= '0' && cp <= '9') {
        for (const auto& p : digit_phonemes(static_cast<char>(cp))) out.phonemes.push_back(p);
      } else if (cp != '\'') {
        std::string raw;
        append_utf8(raw, cp);
        out.phonemes.push_back(std::move(raw));
      }
    }
  };

  for (const auto& tok : seq.tokens) {
    switch (tok.kind) {
      case TokenKind::cjk_char: {
        const auto* p = lex.mandarin.find(tok.surface);
        if (p == nullptr) {
          out.phonemes.push_back(tok.surface);
          break;
        }
        std::string syllable = p->front();
        if (!cfg.keep_tones && !syllable.empty() && syllable.back() >= '0' && syllable.back() <= '9') {
          syllable.pop_back();
        }
        out.phonemes.push_back(std::move(syllable));
        break;
      }
      case TokenKind::latin_word: {
        if (const auto* p = lex.english.find(tok.surface)) {
          out.phonemes.insert(out.phonemes.end(), p->begin(), p->end());
        } else {
          spell(tok.surface);
        }
        break;
      }
      case TokenKind::numeric:
        spell(tok.surface);
        break;
      default:
        if (!tok.surface.empty()) out.phonemes.push_back(tok.surface);
        break;
    }
  }
  return out;
}

}  // namespace csfilter
