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
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "csfilter/hallucination.hpp"
#include "csfilter/manifest.hpp"
#include "csfilter/phonemizer.hpp"

namespace csfilter {

/// Shape of a synthetic code-switched chunk corpus. Category counts are
/// round(rate * chunks), assigned to a seeded random permutation of the chunks.
struct SynthConfig {
  std::size_t chunks = 500;
  double hallucination_rate = 0.2;            // teacher loops or repeats itself
  double repeat_share = 0.3;                  // of those, phrase repeated only twice
  double noisy_rate = 0.2;                    // teacher MER against reference above 0.4
  double validator_hallucination_rate = 0.1;  // validator loops, teacher clean
  std::size_t min_tokens = 20;
  std::size_t max_tokens = 60;

  void validate() const;
};

enum class SynthCategory { clean, teacher_loop, teacher_repeat, noisy, validator_loop };
const char* to_string(SynthCategory c);

struct SynthTruth {
  std::string id;
  SynthCategory category = SynthCategory::clean;
  bool teacher_hallucinated = false;
  bool validator_hallucinated = false;
  bool noisy = false;
  double teacher_mer = 0.0;  // MER(reference, teacher)
};

struct SynthCorpus {
  std::vector<Chunk> chunks;
  std::vector<SynthTruth> truth;
};

/// Deterministic in (cfg, seed, lexicon). Vocabulary comes from the lexicon
/// keys. Every generated item is checked after generation: looping teachers
/// and validators trip the detector, twice-repeated teachers do not, noisy
/// teachers exceed MER 0.4 against the reference, clean teachers stay below it.
SynthCorpus synthesize(const SynthConfig& cfg, std::uint64_t seed, const Lexicon& lex, const NgramConfig& ngram = {},
                       const TextConfig& text = {});

nlohmann::ordered_json to_json(const SynthTruth& t);

}  // namespace csfilter
