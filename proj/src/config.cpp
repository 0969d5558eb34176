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

#include "csfilter/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <thread>

#include "csfilter/error.hpp"
#include "csfilter/parallel.hpp"

namespace csfilter {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string describe(std::string_view key, std::string_view value, std::string_view expected) {
  return std::string(key) + " = \"" + std::string(value) + "\": expected " + std::string(expected);
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(v);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(d)) {
    throw ValidationError(describe(key, v, "a number"));
  }
  return d;
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ValidationError(describe(key, v, "a non-negative integer"));
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ValidationError(describe(key, v, "true or false"));
}

std::vector<std::string_view> split_list(std::string_view v) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

kd::Reduction parse_reduction(std::string_view key, std::string_view v) {
  if (v == "sum") return kd::Reduction::sum;
  if (v == "mean") return kd::Reduction::mean;
  throw ValidationError(describe(key, v, "sum or mean"));
}

const char* to_string(kd::Reduction r) { return r == kd::Reduction::sum ? "sum" : "mean"; }

// Module parse errors do not carry the key; prefix it.
template <typename F>
auto keyed(std::string_view key, F&& f) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(key) + ": " + e.what());
  }
}

}  // namespace

void PipelineConfig::set(std::string_view key, std::string_view raw) {
  const std::string_view v = trim(raw);
  const std::string k(trim(key));

  if (k == "chunker.max_chunk_s") {
    chunker.max_chunk_s = to_double(k, v);
  } else if (k == "chunker.oversize_policy") {
    chunker.oversize_policy = keyed(k, [&] { return parse_oversize_policy(v); });
  } else if (k == "chunker.timestamp_format") {
    chunker.timestamp_format = keyed(k, [&] { return TimestampFormat::parse(v); });
  } else if (k == "chunker.packing") {
    chunker.packing = keyed(k, [&] { return parse_packing_measure(v); });
  } else if (k == "norm.casefold") {
    norm.casefold = to_bool(k, v);
  } else if (k == "norm.strip_punctuation") {
    norm.strip_punctuation = to_bool(k, v);
  } else if (k == "norm.traditional_to_simplified") {
    norm.traditional_to_simplified = to_bool(k, v);
  } else if (k == "ngram.n") {
    ngram.n = to_uint(k, v);
  } else if (k == "ngram.c") {
    ngram.c = to_uint(k, v);
  } else if (k == "ngram.strictly_greater") {
    ngram.strictly_greater = to_bool(k, v);
  } else if (k == "ngram.overlapping") {
    ngram.overlapping = to_bool(k, v);
  } else if (k == "phonemize.keep_tones") {
    phonemize.keep_tones = to_bool(k, v);
  } else if (k == "english_lexicon_path") {
    english_lexicon_path = std::string(v);
  } else if (k == "mandarin_lexicon_path") {
    mandarin_lexicon_path = std::string(v);
  } else if (k == "filter.method") {
    method = keyed(k, [&] { return parse_filter_method(v); });
  } else if (k == "filter.alpha") {
    alpha = to_double(k, v);
  } else if (k == "analysis.alphas") {
    analysis.alphas.clear();
    for (auto item : split_list(v)) analysis.alphas.push_back(to_double(k, item));
  } else if (k == "analysis.high_mer_threshold") {
    analysis.high_mer_threshold = to_double(k, v);
  } else if (k == "analysis.min_retention") {
    analysis.min_retention = to_double(k, v);
  } else if (k == "analysis.methods") {
    analysis_methods.clear();
    for (auto item : split_list(v)) analysis_methods.push_back(keyed(k, [&] { return parse_filter_method(item); }));
  } else if (k == "kdloss.beta") {
    kdloss.beta = to_double(k, v);
  } else if (k == "kdloss.gamma") {
    kdloss.gamma = to_double(k, v);
  } else if (k == "kdloss.reduction") {
    kdloss.reduction = parse_reduction(k, v);
  } else if (k == "synth.chunks") {
    synth.chunks = to_uint(k, v);
  } else if (k == "synth.hallucination_rate") {
    synth.hallucination_rate = to_double(k, v);
  } else if (k == "synth.repeat_share") {
    synth.repeat_share = to_double(k, v);
  } else if (k == "synth.noisy_rate") {
    synth.noisy_rate = to_double(k, v);
  } else if (k == "synth.validator_hallucination_rate") {
    synth.validator_hallucination_rate = to_double(k, v);
  } else if (k == "synth.min_tokens") {
    synth.min_tokens = to_uint(k, v);
  } else if (k == "synth.max_tokens") {
    synth.max_tokens = to_uint(k, v);
  } else if (k == "eval.timing_baseline") {
    timing_baseline = std::string(v);
  } else if (k == "workers") {
    workers = static_cast<unsigned>(to_uint(k, v));
  } else if (k == "seed") {
    seed = to_uint(k, v);
  } else {
    throw ValidationError("unknown config key \"" + k + "\"");
  }
}

void PipelineConfig::validate() const {
  chunker.validate();
  norm.validate();
  ngram.validate();
  filter().validate();
  analysis.validate();
  if (analysis_methods.empty()) throw ValidationError("analysis.methods is empty");
  kdloss.validate();
  synth.validate();
}

TextConfig PipelineConfig::text() const {
  TextConfig t;
  t.timestamps = chunker.timestamp_format;
  t.norm = norm;
  return t;
}

FilterConfig PipelineConfig::filter() const {
  FilterConfig f;
  f.method = method;
  f.alpha = alpha;
  f.ngram = ngram;
  f.phonemize = phonemize;
  f.text = text();
  f.workers = resolved_workers();
  return f;
}

std::filesystem::path PipelineConfig::english_lexicon() const {
  return english_lexicon_path.empty() ? bundled_english_lexicon() : std::filesystem::path(english_lexicon_path);
}

std::filesystem::path PipelineConfig::mandarin_lexicon() const {
  return mandarin_lexicon_path.empty() ? bundled_mandarin_lexicon() : std::filesystem::path(mandarin_lexicon_path);
}

unsigned PipelineConfig::resolved_workers() const { return workers ? workers : default_workers(); }

nlohmann::ordered_json PipelineConfig::to_json() const {
  nlohmann::ordered_json j;
  j["chunker"] = {{"max_chunk_s", chunker.max_chunk_s},
                  {"oversize_policy", to_string(chunker.oversize_policy)},
                  {"timestamp_format", chunker.timestamp_format.pattern()},
                  {"packing", to_string(chunker.packing)}};
  j["norm"] = {{"casefold", norm.casefold},
               {"strip_punctuation", norm.strip_punctuation},
               {"traditional_to_simplified", norm.traditional_to_simplified}};
  j["ngram"] = {{"n", ngram.n},
                {"c", ngram.c},
                {"strictly_greater", ngram.strictly_greater},
                {"overlapping", ngram.overlapping}};
  j["phonemize"] = {{"keep_tones", phonemize.keep_tones}};
  j["filter"] = {{"method", to_string(method)}, {"alpha", alpha}};
  auto methods = nlohmann::ordered_json::array();
  for (auto m : analysis_methods) methods.push_back(to_string(m));
  j["analysis"] = {{"alphas", analysis.alphas},
                   {"high_mer_threshold", analysis.high_mer_threshold},
                   {"min_retention", analysis.min_retention},
                   {"methods", std::move(methods)}};
  j["kdloss"] = {{"beta", kdloss.beta}, {"gamma", kdloss.gamma}, {"reduction", to_string(kdloss.reduction)}};
  j["synth"] = {{"chunks", synth.chunks},
                {"hallucination_rate", synth.hallucination_rate},
                {"repeat_share", synth.repeat_share},
                {"noisy_rate", synth.noisy_rate},
                {"validator_hallucination_rate", synth.validator_hallucination_rate},
                {"min_tokens", synth.min_tokens},
                {"max_tokens", synth.max_tokens}};
  j["english_lexicon"] = english_lexicon_path.empty() ? "bundled" : english_lexicon_path;
  j["mandarin_lexicon"] = mandarin_lexicon_path.empty() ? "bundled" : mandarin_lexicon_path;
  j["timing_baseline"] = timing_baseline;
  j["seed"] = seed;
  return j;
}

PipelineConfig parse_config(std::istream& in) {
  PipelineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body(line);
    // Full-line comments, or " #" after a value.
    if (const auto hash = body.find(" #"); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError(line_no, "config: expected key = value");
    }
    try {
      cfg.set(body.substr(0, eq), body.substr(eq + 1));
    } catch (const ParseError&) {
      throw;
    } catch (const ValidationError& e) {
      throw ParseError(line_no, std::string("config: ") + e.what());
    }
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in);
}

}  // namespace csfilter
