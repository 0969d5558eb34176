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

#include "csfilter/error.hpp"
#include "csfilter/metrics.hpp"
#include "csfilter/synth.hpp"
#include "support.hpp"

using namespace csfilter;
using namespace csfilter::testing;

TEST_SUITE("synth") {
  TEST_CASE("same seed, same corpus") {
    SynthConfig cfg;
    cfg.chunks = 80;
    const auto a = synthesize(cfg, 99, bundled_lexicon());
    const auto b = synthesize(cfg, 99, bundled_lexicon());
    CHECK(a.chunks == b.chunks);
    const auto c = synthesize(cfg, 100, bundled_lexicon());
    CHECK_FALSE(a.chunks == c.chunks);
  }

  TEST_CASE("category counts follow the rounding rule") {
    SynthConfig cfg;
    const auto corpus = synthesize(cfg, 1234, bundled_lexicon());
    std::size_t halluc = 0, noisy = 0, vloop = 0, repeat = 0;
    for (const auto& t : corpus.truth) {
      halluc += t.teacher_hallucinated;
      noisy += t.noisy;
      vloop += t.validator_hallucinated;
      repeat += t.category == SynthCategory::teacher_repeat;
    }
    CHECK(corpus.chunks.size() == 500);
    CHECK(halluc == 100);
    CHECK(repeat == 30);
    CHECK(noisy == 100);
    CHECK(vloop == 50);
  }

  TEST_CASE("generated items pass their self-checks") {
    SynthConfig cfg;
    cfg.chunks = 200;
    const auto corpus = synthesize(cfg, 7, bundled_lexicon());
    const TextConfig text;
    for (std::size_t i = 0; i < corpus.chunks.size(); ++i) {
      const auto& c = corpus.chunks[i];
      const auto& t = corpus.truth[i];
      CHECK(c.id == t.id);
      CHECK(c.duration_s <= 30.0);
      REQUIRE(c.validator_text);
      REQUIRE(c.reference_text);
      const double m = mer(*c.reference_text, c.teacher_text, text).rate.rate;
      CHECK(m == t.teacher_mer);
      const bool teacher_flag = detect(prepare_tokens(c.teacher_text, text), NgramConfig{});
      const bool validator_flag = detect(prepare_tokens(*c.validator_text, text), NgramConfig{});
      switch (t.category) {
        case SynthCategory::clean:
          CHECK(m <= 0.4);
          CHECK_FALSE(teacher_flag);
          CHECK_FALSE(validator_flag);
          break;
        case SynthCategory::noisy:
          CHECK(m > 0.4);
          CHECK_FALSE(teacher_flag);
          break;
        case SynthCategory::teacher_loop:
          CHECK(teacher_flag);
          break;
        case SynthCategory::teacher_repeat:
          CHECK_FALSE(teacher_flag);
          break;
        case SynthCategory::validator_loop:
          CHECK(validator_flag);
          CHECK_FALSE(teacher_flag);
          break;
      }
    }
  }

  TEST_CASE("invalid specifications") {
    SynthConfig cfg;
    cfg.hallucination_rate = 0.7;
    cfg.noisy_rate = 0.5;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    SynthConfig zero;
    zero.chunks = 0;
    CHECK_THROWS_AS(zero.validate(), ValidationError);
    SynthConfig rate;
    rate.noisy_rate = -0.1;
    CHECK_THROWS_AS(rate.validate(), ValidationError);
  }

  TEST_CASE("truth JSON") {
    SynthTruth t;
    t.id = "x";
    t.category = SynthCategory::noisy;
    t.noisy = true;
    t.teacher_mer = 0.5;
    CHECK(to_json(t).dump() ==
          R"({"id":"x","category":"noisy","teacher_hallucinated":false,"validator_hallucinated":false,"noisy":true,"teacher_mer":0.5})");
  }
}
