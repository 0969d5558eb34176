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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "csfilter/hallucination.hpp"
#include "csfilter/manifest.hpp"
#include "csfilter/phonemizer.hpp"
#include "csfilter/textnorm.hpp"

namespace csfilter {

enum class FilterMethod { full_data, trivial, direct_mer, direct_per, composite };

FilterMethod parse_filter_method(std::string_view name);
const char* to_string(FilterMethod m);
bool requires_validator(FilterMethod m);
bool requires_lexicon(FilterMethod m);
bool uses_threshold(FilterMethod m);

struct FilterConfig {
  FilterMethod method = FilterMethod::composite;
  double alpha = 0.4;
  NgramConfig ngram;
  PhonemizeConfig phonemize;
  TextConfig text;
  unsigned workers = 1;

  void validate() const;
};

struct FilterDecision {
  std::string chunk_id;
  FilterMethod method = FilterMethod::full_data;
  std::optional<double> delta;
  bool kept = false;
  std::optional<int> h_teacher;
  std::optional<int> h_validator;

  bool operator==(const FilterDecision&) const = default;
};

struct FilterResult {
  std::vector<Chunk> kept;
  std::vector<FilterDecision> decisions;
  CorpusStats stats;
};

/// MER with the teacher text as reference and the validator text as hypothesis.
double delta_mer(const Chunk& chunk, const FilterConfig& cfg);
/// PER over both texts phonemized with the same lexicon and settings.
double delta_per(const Chunk& chunk, const Lexicon& lex, const FilterConfig& cfg);

struct CompositeScore {
  int h_teacher = 0;
  int h_validator = 0;
  double per = 0.0;  // only computed when neither side is flagged
  double delta = 0.0;
};

/// 1 when the teacher text is flagged by the n-gram detector, otherwise 0 when
/// the validator text is flagged, otherwise the PER distance. Identical to
/// max(h(Y), min(1 - h(V), PER)) whenever PER <= 1, and yields the same keep
/// verdict for every alpha < 1 when PER > 1.
CompositeScore composite_score(const Chunk& chunk, const Lexicon& lex, const FilterConfig& cfg);
double delta_composite(const Chunk& chunk, const Lexicon& lex, const FilterConfig& cfg);

/// Fails fast when a chunk lacks what the method needs.
void check_inputs(std::span<const Chunk> chunks, const FilterConfig& cfg, const Lexicon* lex);

/// Per-chunk scores; `kept` is left false. Output is independent of cfg.workers.
std::vector<FilterDecision> score_chunks(std::span<const Chunk> chunks, const FilterConfig& cfg, const Lexicon* lex);

/// Keep rule: full_data keeps all, trivial keeps h_teacher == 0, the others
/// keep delta <= alpha.
bool keep(const FilterDecision& d, double alpha);

/// Applies `alpha` to scored decisions and assembles the kept corpus.
FilterResult apply_threshold(std::span<const Chunk> chunks, std::vector<FilterDecision> scored, double alpha);

FilterResult run_filter(std::span<const Chunk> chunks, const FilterConfig& cfg, const Lexicon* lex);

nlohmann::ordered_json to_json(const FilterDecision& d);

}  // namespace csfilter
