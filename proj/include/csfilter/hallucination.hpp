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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "csfilter/manifest.hpp"
#include "csfilter/textnorm.hpp"

namespace csfilter {

/// Flags a transcript when some run of n consecutive tokens repeats more than
/// c times (or at least c times when strictly_greater is false).
struct NgramConfig {
  std::size_t n = 4;
  std::size_t c = 2;
  bool strictly_greater = true;
  // Count overlapping window positions; otherwise count a greedy set of
  // non-overlapping occurrences per n-gram.
  bool overlapping = true;

  void validate() const;
};

/// Highest occurrence count of any n-gram in the token-id sequence.
std::size_t max_ngram_count(std::span<const std::size_t> ids, std::size_t n, bool overlapping);

bool detect(const TokenSequence& seq, const NgramConfig& cfg);
bool detect(std::span<const std::string> tokens, const NgramConfig& cfg);

enum class TextField { teacher_text, validator_text, reference_text, hypothesis };
TextField parse_text_field(std::string_view name);
const char* to_string(TextField field);

struct RepetitionCount {
  std::size_t detected = 0;
  std::size_t scanned = 0;
  std::size_t skipped = 0;  // chunks lacking the selected field
};

/// Number of chunks whose selected text is flagged. For TextField::hypothesis
/// the text is looked up by chunk id in `hypotheses`.
RepetitionCount count_repetitive(std::span<const Chunk> chunks, TextField field, const NgramConfig& cfg,
                                 const TextConfig& text = {},
                                 const std::unordered_map<std::string, std::string>* hypotheses = nullptr);

}  // namespace csfilter
