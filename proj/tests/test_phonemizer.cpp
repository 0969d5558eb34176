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

#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "csfilter/error.hpp"
#include "csfilter/phonemizer.hpp"
#include "support.hpp"

using namespace csfilter;
using namespace csfilter::testing;

namespace {

using Phones = std::vector<std::string>;

Phones phones_of(const std::string& text, const PhonemizeConfig& cfg = {}) {
  return phonemize(prepare_tokens(text, TextConfig{}), bundled_lexicon(), cfg).phonemes;
}

}  // namespace

TEST_SUITE("phonemizer") {
  TEST_CASE("lexicon lookups") {
    CHECK(phones_of("你好") == Phones{"ni3", "hao3"});
    CHECK(phones_of("cat") == Phones{"K", "AE", "T"});
    CHECK(phones_of("").empty());
    CHECK(phones_of("Cat 你") == Phones{"K", "AE", "T", "ni3"});
  }

  TEST_CASE("fallbacks") {
    CHECK(phones_of("zq") == Phones{"Z", "IY", "K", "Y", "UW"});
    CHECK(phones_of("42") == Phones{"F", "AO", "R", "T", "UW"});
    CHECK(phones_of("龘") == Phones{"龘"});
    CHECK(letter_phonemes('W') == Phones{"D", "AH", "B", "AH", "L", "Y", "UW"});
    CHECK_THROWS_AS(letter_phonemes('1'), ValidationError);
    CHECK_THROWS_AS(digit_phonemes('a'), ValidationError);
  }

  TEST_CASE("tones can be dropped") {
    PhonemizeConfig cfg;
    cfg.keep_tones = false;
    CHECK(phones_of("你好", cfg) == Phones{"ni", "hao"});
  }

  TEST_CASE("homophones share a pronunciation") {
    CHECK(phones_of("是") == phones_of("事"));
    CHECK(phones_of("他") == phones_of("她"));
  }

  TEST_CASE("loading rules") {
    std::istringstream empty("");
    const auto t = load_lexicon(empty, LexiconFormat::tsv, LexiconKind::english);
    CHECK(t.size() == 0);

    std::istringstream dup("# comment\n\nread\tR IY D\nread\tR EH D\n");
    const auto d = load_lexicon(dup, LexiconFormat::tsv, LexiconKind::english);
    REQUIRE(d.find("read") != nullptr);
    CHECK(*d.find("read") == Phones{"R", "IY", "D"});
    CHECK(d.duplicates == 1);
    CHECK(d.lines_read == 2);

    std::istringstream bad("好\thao3\n坏\thuai\n");
    try {
      load_lexicon(bad, LexiconFormat::tsv, LexiconKind::mandarin);
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    std::istringstream notab("word PHONE\n");
    CHECK_THROWS_AS(load_lexicon(notab, LexiconFormat::tsv, LexiconKind::english), ParseError);
  }

  TEST_CASE("entry count matches a random generated lexicon") {
    for (int round = 0; round < 20; ++round) {
      std::set<std::string> keys;
      std::ostringstream text;
      const int n = between(0, 200);
      for (int i = 0; i < n; ++i) {
        std::string key;
        for (int k = between(1, 6); k > 0; --k) key.push_back(static_cast<char>('a' + pick(26)));
        keys.insert(key);
        text << key << '\t' << "P" << pick(10) << " Q\n";
        if (pick(10) == 0) text << "# note\n\n";
      }
      std::istringstream in(text.str());
      const auto t = load_lexicon(in, LexiconFormat::tsv, LexiconKind::english);
      CHECK(t.size() == keys.size());
      CHECK(t.lines_read == static_cast<std::size_t>(n));
      CHECK(t.duplicates == static_cast<std::size_t>(n) - keys.size());
    }
  }

  TEST_CASE("bundled lexicons load") {
    const auto& lex = bundled_lexicon();
    CHECK(lex.english.size() > 100);
    CHECK(lex.mandarin.size() > 300);
    CHECK_THROWS_AS(load_lexicon_files("/nonexistent/en.tsv", bundled_mandarin_lexicon()), IoError);
  }
}
