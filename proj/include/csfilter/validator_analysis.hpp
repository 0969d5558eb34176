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
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "csfilter/filter.hpp"

namespace csfilter {

/// The nine-point grid 0.1, 0.2, ..., 0.9.
std::vector<double> default_alpha_grid();

struct AnalysisConfig {
  std::vector<double> alphas = default_alpha_grid();
  double high_mer_threshold = 0.4;
  // Max recall only considers alphas keeping strictly more than this share of chunks.
  double min_retention = 0.5;

  void validate() const;
};

/// True where MER(reference_text, teacher_text) is strictly above `threshold`.
std::vector<bool> label_high_mer(std::span<const Chunk> chunks, double threshold, const TextConfig& text = {},
                                 unsigned workers = 1);

struct AlphaPoint {
  double alpha = 0.0;
  std::size_t kept = 0;
  std::size_t total = 0;
  double retention = 0.0;           // count based
  double duration_retention = 0.0;  // reported alongside
  std::size_t high_mer_total = 0;
  std::size_t high_mer_removed = 0;
  double recall = 0.0;
  bool vacuous = false;  // no high-MER chunks; recall reported as 1

  bool operator==(const AlphaPoint&) const = default;
};

struct RecallReport {
  FilterMethod method = FilterMethod::composite;
  std::vector<double> alphas;
  std::vector<AlphaPoint> per_alpha;
  std::optional<double> max_recall;  // absent when no alpha keeps enough data
  std::optional<double> max_recall_alpha;
  double avg_recall = 0.0;
  double high_mer_threshold = 0.4;
};

/// Recall of high-MER pseudo-labels removed by `method` at every alpha of the
/// grid, plus the best recall among alphas retaining more than half of the
/// chunks and the mean recall over the whole grid. `base` supplies every
/// filter setting except method and alpha.
RecallReport recall_sweep(std::span<const Chunk> chunks, FilterMethod method, const AnalysisConfig& analysis,
                          const Lexicon* lex, const FilterConfig& base);

/// Same sweep with precomputed high-MER labels.
RecallReport recall_sweep(std::span<const Chunk> chunks, const std::vector<bool>& high_mer, FilterMethod method,
                          const AnalysisConfig& analysis, const Lexicon* lex, const FilterConfig& base);

nlohmann::ordered_json to_json(const RecallReport& r);

}  // namespace csfilter
