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

#include "csfilter/filter.hpp"

#include <cmath>

#include "csfilter/error.hpp"
#include "csfilter/metrics.hpp"
#include "csfilter/parallel.hpp"

namespace csfilter {

namespace {

const std::string& validator_of(const Chunk& chunk) {
  if (!chunk.validator_text) throw ValidationError("chunk \"" + chunk.id + "\" has no validator_text");
  return *chunk.validator_text;
}

double per_distance(const TokenSequence& teacher, const TokenSequence& validator, const Lexicon& lex,
                    const FilterConfig& cfg) {
  return per(phonemize(teacher, lex, cfg.phonemize), phonemize(validator, lex, cfg.phonemize)).rate;
}

}  // namespace

FilterMethod parse_filter_method(std::string_view name) {
  if (name == "full_data") return FilterMethod::full_data;
  if (name == "trivial") return FilterMethod::trivial;
  if (name == "direct_mer") return FilterMethod::direct_mer;
  if (name == "direct_per") return FilterMethod::direct_per;
  if (name == "composite") return FilterMethod::composite;
  throw ValidationError("unknown filter method \"" + std::string(name) +
                        "\" (expected full_data, trivial, direct_mer, direct_per or composite)");
}

const char* to_string(FilterMethod m) {
  switch (m) {
    case FilterMethod::full_data:
      return "full_data";
    case FilterMethod::trivial:
      return "trivial";
    case FilterMethod::direct_mer:
      return "direct_mer";
    case FilterMethod::direct_per:
      return "direct_per";
    case FilterMethod::composite:
      return "composite";
  }
  return "full_data";
}

bool requires_validator(FilterMethod m) {
  return m == FilterMethod::direct_mer || m == FilterMethod::direct_per || m == FilterMethod::composite;
}

bool requires_lexicon(FilterMethod m) { return m == FilterMethod::direct_per || m == FilterMethod::composite; }

bool uses_threshold(FilterMethod m) { return requires_validator(m); }

void FilterConfig::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ValidationError("filter.alpha must lie in [0, 1)");
  ngram.validate();
  text.norm.validate();
}

double delta_mer(const Chunk& chunk, const FilterConfig& cfg) {
  return mer(chunk.teacher_text, validator_of(chunk), cfg.text).rate.rate;
}

double delta_per(const Chunk& chunk, const Lexicon& lex, const FilterConfig& cfg) {
  const auto& v = validator_of(chunk);
  return per_distance(prepare_tokens(chunk.teacher_text, cfg.text), prepare_tokens(v, cfg.text), lex, cfg);
}

CompositeScore composite_score(const Chunk& chunk, const Lexicon& lex, const FilterConfig& cfg) {
  const auto& v = validator_of(chunk);
  const auto teacher = prepare_tokens(chunk.teacher_text, cfg.text);
  const auto validator = prepare_tokens(v, cfg.text);
  CompositeScore s;
  s.h_teacher = detect(teacher, cfg.ngram) ? 1 : 0;
  s.h_validator = detect(validator, cfg.ngram) ? 1 : 0;
  if (s.h_teacher == 1) {
    s.delta = 1.0;
  } else if (s.h_validator == 1) {
    s.delta = 0.0;
  } else {
    s.per = per_distance(teacher, validator, lex, cfg);
    s.delta = s.per;
  }
  return s;
}

double delta_composite(const Chunk& chunk, const Lexicon& lex, const FilterConfig& cfg) {
  return composite_score(chunk, lex, cfg).delta;
}

void check_inputs(std::span<const Chunk> chunks, const FilterConfig& cfg, const Lexicon* lex) {
  cfg.validate();
  if (requires_lexicon(cfg.method) && lex == nullptr) {
    throw ValidationError(std::string("method ") + to_string(cfg.method) + " needs a lexicon");
  }
  if (!requires_validator(cfg.method)) return;
  for (const auto& c : chunks) {
    if (!c.validator_text) {
      throw ValidationError(std::string("method ") + to_string(cfg.method) + " needs validator_text; chunk \"" +
                            c.id + "\" has none");
    }
  }
}

std::vector<FilterDecision> score_chunks(std::span<const Chunk> chunks, const FilterConfig& cfg, const Lexicon* lex) {
  check_inputs(chunks, cfg, lex);
  std::vector<FilterDecision> out(chunks.size());
  parallel_for(chunks.size(), cfg.workers, [&](std::size_t i) {
    const Chunk& c = chunks[i];
    FilterDecision& d = out[i];
    d.chunk_id = c.id;
    d.method = cfg.method;
    switch (cfg.method) {
      case FilterMethod::full_data:
        break;
      case FilterMethod::trivial:
        d.h_teacher = detect(prepare_tokens(c.teacher_text, cfg.text), cfg.ngram) ? 1 : 0;
        break;
      case FilterMethod::direct_mer:
        d.delta = delta_mer(c, cfg);
        break;
      case FilterMethod::direct_per:
        d.delta = delta_per(c, *lex, cfg);
        break;
      case FilterMethod::composite: {
        const auto s = composite_score(c, *lex, cfg);
        d.delta = s.delta;
        d.h_teacher = s.h_teacher;
        d.h_validator = s.h_validator;
        break;
      }
    }
  });
  return out;
}

bool keep(const FilterDecision& d, double alpha) {
  switch (d.method) {
    case FilterMethod::full_data:
      return true;
    case FilterMethod::trivial:
      return d.h_teacher.value_or(0) == 0;
    default:
      return d.delta.has_value() && *d.delta <= alpha;
  }
}

FilterResult apply_threshold(std::span<const Chunk> chunks, std::vector<FilterDecision> scored, double alpha) {
  if (scored.size() != chunks.size()) throw ValidationError("decision count does not match chunk count");
  FilterResult r;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    scored[i].kept = keep(scored[i], alpha);
    if (scored[i].kept) r.kept.push_back(chunks[i]);
  }
  r.decisions = std::move(scored);
  r.stats = compute_stats(chunks, r.kept);
  return r;
}

FilterResult run_filter(std::span<const Chunk> chunks, const FilterConfig& cfg, const Lexicon* lex) {
  return apply_threshold(chunks, score_chunks(chunks, cfg, lex), cfg.alpha);
}

nlohmann::ordered_json to_json(const FilterDecision& d) {
  nlohmann::ordered_json j;
  j["chunk_id"] = d.chunk_id;
  j["method"] = to_string(d.method);
  if (d.delta) j["delta"] = *d.delta;
  if (d.h_teacher) j["h_teacher"] = *d.h_teacher;
  if (d.h_validator) j["h_validator"] = *d.h_validator;
  j["kept"] = d.kept;
  return j;
}

}  // namespace csfilter
