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

#include <functional>

#include "csfilter/error.hpp"
#include "csfilter/metrics.hpp"
#include "support.hpp"

using namespace csfilter;
using namespace csfilter::testing;

namespace {

using Seq = std::vector<int>;

// Exhaustive recursion over every edit script.
std::size_t brute_distance(const Seq& a, std::size_t i, const Seq& b, std::size_t j) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  const std::size_t sub = brute_distance(a, i + 1, b, j + 1) + (a[i] == b[j] ? 0 : 1);
  const std::size_t del = brute_distance(a, i + 1, b, j) + 1;
  const std::size_t ins = brute_distance(a, i, b, j + 1) + 1;
  return std::min({sub, del, ins});
}

Seq random_seq(std::size_t max_len, int alphabet) {
  Seq s(pick(max_len + 1));
  for (auto& x : s) x = static_cast<int>(pick(static_cast<std::size_t>(alphabet)));
  return s;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("alignment examples") {
    const std::vector<std::string> same = {"a", "b", "c", "d", "e"};
    const auto a = align(same, same);
    CHECK(a.distance() == 0);
    CHECK(a.matches == 5);
    const auto d = align(std::vector<std::string>{"a", "b", "c"}, std::vector<std::string>{"a", "c"});
    CHECK(d.deletions == 1);
    CHECK(d.distance() == 1);
    CHECK(d.ops == std::vector<EditOp>{EditOp::match, EditOp::del, EditOp::match});
  }

  TEST_CASE("alignment agrees with the recursive oracle") {
    for (int i = 0; i < 1000; ++i) {
      const Seq ref = random_seq(8, 1 + static_cast<int>(pick(5)));
      const Seq hyp = random_seq(8, 1 + static_cast<int>(pick(5)));
      const auto a = align(ref, hyp);
      CHECK(a.distance() == brute_distance(ref, 0, hyp, 0));
      CHECK(a.deletions + a.substitutions + a.matches == ref.size());
      CHECK(a.insertions + a.substitutions + a.matches == hyp.size());
      CHECK(a.ops.size() == a.matches + a.distance());
    }
  }

  TEST_CASE("MER examples") {
    CHECK(mer("你好 world", "你好 world").rate.rate == 0.0);
    CHECK(mer("你 好 world", "你 world").rate.rate == doctest::Approx(1.0 / 3.0));
    CHECK(mer("我 用 python 寫 code", "我 用 java 寫 code").rate.rate == doctest::Approx(0.2));
    const auto r = mer("", "something");
    CHECK(r.rate.degenerate);
    CHECK(r.rate.rate == 1.0);
    const auto e = mer("", "");
    CHECK(e.rate.rate == 0.0);
  }

  TEST_CASE("MER is zero exactly for equal token sequences") {
    static const char* const kTexts[] = {"你好 world", "你 好 World!", "hello", "", "世界 hello 你好", "你好world"};
    for (const char* a : kTexts) {
      for (const char* b : kTexts) {
        const auto m = mer(a, b);
        CHECK((m.rate.rate == 0.0) == (m.ref == m.hyp));
        CHECK(m.rate.rate ==
              static_cast<double>(m.alignment.distance()) / static_cast<double>(std::max<std::size_t>(m.ref.size(), 1)));
      }
    }
  }

  TEST_CASE("per-language attribution") {
    const auto r = per_language_rates("你 好 world", "你 world");
    CHECK(r.mandarin_cer.rate == doctest::Approx(0.5));
    CHECK(r.english_wer.rate == 0.0);
    CHECK(r.english_wer.denominator == 1);
    const auto same = per_language_rates("你好 world", "你好 world");
    CHECK(same.mandarin_cer.rate == 0.0);
    CHECK(same.english_wer.rate == 0.0);
    const auto en = per_language_rates("hello world", "hello there");
    CHECK(en.mandarin_cer.absent);
    CHECK(en.english_wer.rate == doctest::Approx(0.5));
    const auto ins = per_language_rates("hello", "hello 你");
    CHECK(ins.mandarin_cer.degenerate);
    CHECK(ins.mandarin_cer.numerator == 1);
  }

  TEST_CASE("language counts sum to the mixed counts") {
    static const char* const kTexts[] = {"我用 python 寫 code", "我们 use java 写 code 42", "hello 世界", "数据 data"};
    for (const char* a : kTexts) {
      for (const char* b : kTexts) {
        const auto m = mer(a, b);
        const auto l = attribute_languages(m);
        CHECK(l.mandarin.errors() + l.english.errors() + l.other.errors() == m.alignment.distance());
        CHECK(l.mandarin.ref_len + l.english.ref_len + l.other.ref_len == m.alignment.ref_len);
      }
    }
  }

  TEST_CASE("phoneme error rate") {
    CHECK(per(PhonemeSequence{{"ni3", "hao3"}}, PhonemeSequence{{"ni3", "hao4"}}).rate == 0.5);
    CHECK(per(PhonemeSequence{{"K", "AE", "T"}}, PhonemeSequence{{"K", "AE", "T"}}).rate == 0.0);
    CHECK(per(PhonemeSequence{}, PhonemeSequence{}).rate == 0.0);
  }

  TEST_CASE("real-time factor arithmetic") {
    CHECK(rtf({100.0, 10.0, "x"}) == doctest::Approx(0.1));
    CHECK(speedup(0.5, 0.1) == doctest::Approx(5.0));
    const std::vector<TimingRecord> runs = {
        {1.0, 0.10, "s"}, {1.0, 0.12, "s"}, {1.0, 0.11, "s"}, {1.0, 0.09, "s"}, {1.0, 0.13, "s"}};
    CHECK(mean_rtf(runs) == doctest::Approx(0.11));
    CHECK_THROWS_AS(speedup(0.5, 0.0), ValidationError);
    CHECK_THROWS_AS(rtf({0.0, 1.0, "x"}), ValidationError);
  }

  TEST_CASE("error counts accumulate before dividing") {
    ErrorCounts c;
    c += align(std::vector<int>{1, 2, 3}, std::vector<int>{1, 3});
    c += align(std::vector<int>{4}, std::vector<int>{4, 5});
    CHECK(c.ref_len == 4);
    CHECK(c.errors() == 2);
    CHECK(c.rate(RateKind::mer).rate == 0.5);
  }
}
