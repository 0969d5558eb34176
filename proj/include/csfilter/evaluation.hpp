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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "csfilter/hallucination.hpp"
#include "csfilter/manifest.hpp"
#include "csfilter/metrics.hpp"

namespace csfilter {

/// Hypothesis transcripts keyed by chunk id, in file order.
struct Hypotheses {
  std::vector<std::pair<std::string, std::string>> entries;

  std::unordered_map<std::string, std::string> by_id() const;
};

/// JSONL of {"id": ..., "text": ...}; duplicate ids and unknown keys are ParseErrors.
Hypotheses read_hypotheses(std::istream& in);
Hypotheses load_hypotheses(const std::filesystem::path& path);

struct IdMismatch {
  std::vector<std::string> missing;     // chunk ids without a hypothesis, manifest order
  std::vector<std::string> unexpected;  // hypothesis ids without a chunk, file order

  bool empty() const { return missing.empty() && unexpected.empty(); }
  std::string describe(std::size_t max_listed = 20) const;
};

IdMismatch match_ids(std::span<const Chunk> chunks, const Hypotheses& hyps);

/// Corpus-level scores. Every percentage shares the total reference token
/// count as denominator, so del + ins + sub equals the MER percentage.
struct CorpusEval {
  std::size_t chunks = 0;
  std::size_t hyp_tokens = 0;
  ErrorCounts total;
  LanguageCounts languages;
  ErrorRate mer;
  ErrorRate mandarin_cer;
  ErrorRate english_wer;
  double mer_pct = 0.0;
  double del_pct = 0.0;
  double ins_pct = 0.0;
  double sub_pct = 0.0;
  RepetitionCount repetition;  // over hypotheses
};

/// Requires reference_text on every chunk and a one-to-one id match.
CorpusEval evaluate(std::span<const Chunk> chunks, const Hypotheses& hyps, const TextConfig& text = {},
                    const NgramConfig& ngram = {}, unsigned workers = 1);

/// JSONL of {"system_label", "audio_s", "processing_s"}.
std::vector<TimingRecord> read_timings(std::istream& in);
std::vector<TimingRecord> load_timings(const std::filesystem::path& path);

struct SystemTiming {
  std::string label;
  std::size_t runs = 0;
  double audio_s = 0.0;
  double processing_s = 0.0;
  double mean_rtf = 0.0;
  double speedup = 0.0;  // baseline mean RTF / this mean RTF
};

/// One row per label in first-seen order. An empty `baseline` selects the
/// first label; an unknown one is a ValidationError.
std::vector<SystemTiming> summarize_timings(std::span<const TimingRecord> runs, std::string_view baseline = {});

/// (mer - baseline) / baseline * 100; negative values are improvements.
double mix_error_reduction(double mer, double baseline_mer);

}  // namespace csfilter
