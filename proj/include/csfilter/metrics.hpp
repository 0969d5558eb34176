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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csfilter/phonemizer.hpp"
#include "csfilter/textnorm.hpp"

namespace csfilter {

enum class EditOp : std::uint8_t { match, sub, del, ins };

/// Minimal unit-cost alignment of a hypothesis against a reference.
struct Alignment {
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t substitutions = 0;
  std::size_t matches = 0;
  std::size_t ref_len = 0;
  std::vector<EditOp> ops;

  std::size_t distance() const { return deletions + insertions + substitutions; }
  bool operator==(const Alignment&) const = default;
};

/// Levenshtein alignment with del = ins = sub = 1. The backtrace runs from the
/// end and prefers match, then substitution, then deletion, then insertion.
template <typename T, typename Eq = std::equal_to<>>
Alignment align(std::span<const T> ref, std::span<const T> hyp, Eq eq = {}) {
  const std::size_t rows = ref.size() + 1;
  const std::size_t cols = hyp.size() + 1;
  std::vector<std::uint32_t> cost(rows * cols);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return cost[i * cols + j]; };
  for (std::size_t i = 0; i < rows; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j < cols; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i < rows; ++i) {
    for (std::size_t j = 1; j < cols; ++j) {
      const std::uint32_t diag = at(i - 1, j - 1) + (eq(ref[i - 1], hyp[j - 1]) ? 0u : 1u);
      at(i, j) = std::min({diag, at(i - 1, j) + 1u, at(i, j - 1) + 1u});
    }
  }

  Alignment a;
  a.ref_len = ref.size();
  a.ops.reserve(std::max(ref.size(), hyp.size()));
  std::size_t i = ref.size();
  std::size_t j = hyp.size();
  while (i > 0 || j > 0) {
    const std::uint32_t here = at(i, j);
    if (i > 0 && j > 0 && eq(ref[i - 1], hyp[j - 1]) && here == at(i - 1, j - 1)) {
      a.ops.push_back(EditOp::match);
      ++a.matches;
      --i;
      --j;
    } else if (i > 0 && j > 0 && here == at(i - 1, j - 1) + 1) {
      a.ops.push_back(EditOp::sub);
      ++a.substitutions;
      --i;
      --j;
    } else if (i > 0 && here == at(i - 1, j) + 1) {
      a.ops.push_back(EditOp::del);
      ++a.deletions;
      --i;
    } else {
      a.ops.push_back(EditOp::ins);
      ++a.insertions;
      --j;
    }
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

template <typename T, typename Eq = std::equal_to<>>
Alignment align(const std::vector<T>& ref, const std::vector<T>& hyp, Eq eq = {}) {
  return align(std::span<const T>(ref), std::span<const T>(hyp), eq);
}

enum class RateKind { mer, cer, wer, per };
const char* to_string(RateKind kind);

/// rate = numerator / max(denominator, 1), computed from integer counts.
struct ErrorRate {
  double rate = 0.0;
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  RateKind kind = RateKind::mer;
  bool degenerate = false;  // empty reference with a non-empty hypothesis
  bool absent = false;      // no reference units and no attributed errors

  static ErrorRate from_counts(std::size_t errors, std::size_t ref_units, RateKind kind);
};

/// Error counts that can be summed across utterances before dividing.
struct ErrorCounts {
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t substitutions = 0;
  std::size_t matches = 0;
  std::size_t ref_len = 0;

  std::size_t errors() const { return deletions + insertions + substitutions; }
  ErrorCounts& operator+=(const ErrorCounts& o);
  ErrorCounts& operator+=(const Alignment& a);
  ErrorRate rate(RateKind kind) const { return ErrorRate::from_counts(errors(), ref_len, kind); }
};

struct MerResult {
  ErrorRate rate;
  Alignment alignment;
  TokenSequence ref;
  TokenSequence hyp;
};

/// Mixed error rate over CJK characters and Latin words. Both texts go through
/// the same timestamp stripping, normalization and tokenization.
MerResult mer(std::string_view ref_text, std::string_view hyp_text, const TextConfig& cfg = {});
MerResult mer_tokens(TokenSequence ref, TokenSequence hyp);

/// Per-language counts attributed from a mixed alignment: reference-consuming
/// operations count toward the reference token's language, insertions toward
/// the inserted hypothesis token's language.
struct LanguageCounts {
  ErrorCounts mandarin;
  ErrorCounts english;
  ErrorCounts other;
};

LanguageCounts attribute_languages(const MerResult& m);

struct LanguageRates {
  ErrorRate mandarin_cer;
  ErrorRate english_wer;
};

LanguageRates per_language_rates(std::string_view ref_text, std::string_view hyp_text, const TextConfig& cfg = {});
LanguageRates per_language_rates(const MerResult& m);

/// Phoneme error rate; the first argument is the reference side.
ErrorRate per(const PhonemeSequence& ref, const PhonemeSequence& hyp);

struct TimingRecord {
  double audio_s = 0.0;
  double processing_s = 0.0;
  std::string system_label;
};

double rtf(const TimingRecord& t);
/// Arithmetic mean of per-run real-time factors.
double mean_rtf(std::span<const TimingRecord> runs);
/// base / other; other == 0 is an error.
double speedup(double base_rtf, double other_rtf);

}  // namespace csfilter
