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

#include "csfilter/validator_analysis.hpp"

#include <algorithm>
#include <memory>

#include "csfilter/error.hpp"
#include "csfilter/metrics.hpp"
#include "csfilter/parallel.hpp"

namespace csfilter {

std::vector<double> default_alpha_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 9; ++k) g.push_back(k / 10.0);
  return g;
}

void AnalysisConfig::validate() const {
  if (alphas.empty()) throw ValidationError("analysis.alphas is empty");
  for (double a : alphas) {
    if (!(a >= 0.0 && a < 1.0)) throw ValidationError("analysis.alphas entries must lie in [0, 1)");
  }
  if (!(high_mer_threshold >= 0.0)) throw ValidationError("analysis.high_mer_threshold must be >= 0");
  if (!(min_retention >= 0.0 && min_retention < 1.0)) throw ValidationError("analysis.min_retention must lie in [0, 1)");
}

std::vector<bool> label_high_mer(std::span<const Chunk> chunks, double threshold, const TextConfig& text,
                                 unsigned workers) {
  for (const auto& c : chunks) {
    if (!c.reference_text) throw ValidationError("chunk \"" + c.id + "\" has no reference_text");
  }
  std::unique_ptr<bool[]> flags(new bool[chunks.size()]);
  parallel_for(chunks.size(), workers, [&](std::size_t i) {
    flags[i] = mer(*chunks[i].reference_text, chunks[i].teacher_text, text).rate.rate > threshold;
  });
  return std::vector<bool>(flags.get(), flags.get() + chunks.size());
}

RecallReport recall_sweep(std::span<const Chunk> chunks, const std::vector<bool>& high_mer, FilterMethod method,
                          const AnalysisConfig& analysis, const Lexicon* lex, const FilterConfig& base) {
  analysis.validate();
  if (chunks.empty()) throw ValidationError("recall sweep over an empty chunk list");
  if (high_mer.size() != chunks.size()) throw ValidationError("high-MER labels do not match chunk count");

  FilterConfig cfg = base;
  cfg.method = method;
  const auto scored = score_chunks(chunks, cfg, lex);

  RecallReport r;
  r.method = method;
  r.high_mer_threshold = analysis.high_mer_threshold;
  r.alphas = analysis.alphas;
  std::sort(r.alphas.begin(), r.alphas.end());

  const std::size_t high_total = static_cast<std::size_t>(std::count(high_mer.begin(), high_mer.end(), true));
  double recall_sum = 0.0;
  for (double alpha : r.alphas) {
    const auto result = apply_threshold(chunks, scored, alpha);
    AlphaPoint p;
    p.alpha = alpha;
    p.total = chunks.size();
    p.kept = result.kept.size();
    p.retention = result.stats.count_retention_rate;
    p.duration_retention = result.stats.retention_rate;
    p.high_mer_total = high_total;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      if (high_mer[i] && !result.decisions[i].kept) ++p.high_mer_removed;
    }
    p.vacuous = high_total == 0;
    p.recall = p.vacuous ? 1.0 : static_cast<double>(p.high_mer_removed) / static_cast<double>(high_total);
    recall_sum += p.recall;
    if (p.retention > analysis.min_retention && (!r.max_recall || p.recall > *r.max_recall)) {
      r.max_recall = p.recall;
      r.max_recall_alpha = alpha;
    }
    r.per_alpha.push_back(p);
  }
  r.avg_recall = recall_sum / static_cast<double>(r.alphas.size());
  return r;
}

RecallReport recall_sweep(std::span<const Chunk> chunks, FilterMethod method, const AnalysisConfig& analysis,
                          const Lexicon* lex, const FilterConfig& base) {
  analysis.validate();
  if (chunks.empty()) throw ValidationError("recall sweep over an empty chunk list");
  const auto labels = label_high_mer(chunks, analysis.high_mer_threshold, base.text, base.workers);
  return recall_sweep(chunks, labels, method, analysis, lex, base);
}

nlohmann::ordered_json to_json(const RecallReport& r) {
  nlohmann::ordered_json j;
  j["method"] = to_string(r.method);
  j["high_mer_threshold"] = r.high_mer_threshold;
  j["alphas"] = r.alphas;
  auto points = nlohmann::ordered_json::array();
  for (const auto& p : r.per_alpha) {
    points.push_back({{"alpha", p.alpha},
                      {"kept", p.kept},
                      {"total", p.total},
                      {"retention", p.retention},
                      {"duration_retention", p.duration_retention},
                      {"high_mer_total", p.high_mer_total},
                      {"high_mer_removed", p.high_mer_removed},
                      {"recall", p.recall},
                      {"vacuous", p.vacuous}});
  }
  j["per_alpha"] = std::move(points);
  if (r.max_recall) {
    j["max_recall"] = *r.max_recall;
    j["max_recall_alpha"] = *r.max_recall_alpha;
  } else {
    j["max_recall"] = nullptr;
    j["max_recall_absent"] = true;
  }
  j["avg_recall"] = r.avg_recall;
  return j;
}

}  // namespace csfilter
