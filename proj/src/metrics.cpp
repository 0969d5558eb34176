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

#include "csfilter/metrics.hpp"

#include <cmath>

#include "csfilter/error.hpp"

namespace csfilter {

const char* to_string(RateKind kind) {
  switch (kind) {
    case RateKind::mer:
      return "mer";
    case RateKind::cer:
      return "cer";
    case RateKind::wer:
      return "wer";
    case RateKind::per:
      return "per";
  }
  return "mer";
}

ErrorRate ErrorRate::from_counts(std::size_t errors, std::size_t ref_units, RateKind kind) {
  ErrorRate r;
  r.kind = kind;
  r.numerator = errors;
  r.denominator = ref_units == 0 ? 1 : ref_units;
  r.degenerate = ref_units == 0 && errors > 0;
  r.absent = ref_units == 0 && errors == 0;
  r.rate = static_cast<double>(errors) / static_cast<double>(r.denominator);
  return r;
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& o) {
  deletions += o.deletions;
  insertions += o.insertions;
  substitutions += o.substitutions;
  matches += o.matches;
  ref_len += o.ref_len;
  return *this;
}

ErrorCounts& ErrorCounts::operator+=(const Alignment& a) {
  deletions += a.deletions;
  insertions += a.insertions;
  substitutions += a.substitutions;
  matches += a.matches;
  ref_len += a.ref_len;
  return *this;
}

MerResult mer_tokens(TokenSequence ref, TokenSequence hyp) {
  MerResult m;
  m.ref = std::move(ref);
  m.hyp = std::move(hyp);
  m.alignment = align(m.ref.tokens, m.hyp.tokens);
  m.rate = ErrorRate::from_counts(m.alignment.distance(), m.alignment.ref_len, RateKind::mer);
  return m;
}

MerResult mer(std::string_view ref_text, std::string_view hyp_text, const TextConfig& cfg) {
  return mer_tokens(prepare_tokens(ref_text, cfg), prepare_tokens(hyp_text, cfg));
}

LanguageCounts attribute_languages(const MerResult& m) {
  LanguageCounts out;
  auto bucket = [&](TokenKind kind) -> ErrorCounts& {
    switch (language_of(kind)) {
      case Language::mandarin:
        return out.mandarin;
      case Language::english:
        return out.english;
      default:
        return out.other;
    }
  };
  std::size_t i = 0;
  std::size_t j = 0;
  for (EditOp op : m.alignment.ops) {
    switch (op) {
      case EditOp::match: {
        auto& b = bucket(m.ref.tokens[i].kind);
        ++b.matches;
        ++b.ref_len;
        ++i;
        ++j;
        break;
      }
      case EditOp::sub: {
        auto& b = bucket(m.ref.tokens[i].kind);
        ++b.substitutions;
        ++b.ref_len;
        ++i;
        ++j;
        break;
      }
      case EditOp::del: {
        auto& b = bucket(m.ref.tokens[i].kind);
        ++b.deletions;
        ++b.ref_len;
        ++i;
        break;
      }
      case EditOp::ins:
        ++bucket(m.hyp.tokens[j].kind).insertions;
        ++j;
        break;
    }
  }
  return out;
}

LanguageRates per_language_rates(const MerResult& m) {
  const auto counts = attribute_languages(m);
  return {counts.mandarin.rate(RateKind::cer), counts.english.rate(RateKind::wer)};
}

LanguageRates per_language_rates(std::string_view ref_text, std::string_view hyp_text, const TextConfig& cfg) {
  return per_language_rates(mer(ref_text, hyp_text, cfg));
}

ErrorRate per(const PhonemeSequence& ref, const PhonemeSequence& hyp) {
  const auto a = align(ref.phonemes, hyp.phonemes);
  return ErrorRate::from_counts(a.distance(), a.ref_len, RateKind::per);
}

double rtf(const TimingRecord& t) {
  if (!(t.audio_s > 0.0)) throw ValidationError("timing \"" + t.system_label + "\": audio_s must be positive");
  if (t.processing_s < 0.0) throw ValidationError("timing \"" + t.system_label + "\": negative processing_s");
  return t.processing_s / t.audio_s;
}

double mean_rtf(std::span<const TimingRecord> runs) {
  if (runs.empty()) throw ValidationError("no timing runs");
  double sum = 0.0;
  for (const auto& r : runs) sum += rtf(r);
  return sum / static_cast<double>(runs.size());
}

double speedup(double base_rtf, double other_rtf) {
  if (other_rtf == 0.0) throw ValidationError("speed-up against a zero real-time factor");
  return base_rtf / other_rtf;
}

}  // namespace csfilter
