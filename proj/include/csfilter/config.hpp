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

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "csfilter/chunker.hpp"
#include "csfilter/filter.hpp"
#include "csfilter/kdloss.hpp"
#include "csfilter/synth.hpp"
#include "csfilter/validator_analysis.hpp"

namespace csfilter {

/// Every tunable of the pipeline. Loaded from a "key = value" text file
/// ('#' starts a comment), then overridden by command-line flags.
struct PipelineConfig {
  ChunkerConfig chunker;
  NormConfig norm;
  NgramConfig ngram;
  PhonemizeConfig phonemize;
  FilterMethod method = FilterMethod::composite;
  double alpha = 0.4;
  AnalysisConfig analysis;
  std::vector<FilterMethod> analysis_methods = {FilterMethod::direct_mer, FilterMethod::direct_per,
                                                FilterMethod::composite};
  kd::KDLossConfig kdloss;
  SynthConfig synth;
  std::string english_lexicon_path;   // empty: bundled lexicon
  std::string mandarin_lexicon_path;  // empty: bundled lexicon
  std::string timing_baseline;        // empty: first system in the timings file
  unsigned workers = 0;               // 0: available parallelism
  std::uint64_t seed = 1234;

  /// Applies one setting; unknown keys and unparsable values are ValidationErrors.
  void set(std::string_view key, std::string_view value);
  void validate() const;

  TextConfig text() const;
  FilterConfig filter() const;
  std::filesystem::path english_lexicon() const;
  std::filesystem::path mandarin_lexicon() const;
  unsigned resolved_workers() const;

  /// Resolved settings that affect outputs. The worker count is omitted so
  /// that reports do not depend on it.
  nlohmann::ordered_json to_json() const;
};

PipelineConfig parse_config(std::istream& in);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace csfilter
