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

#include "csfilter/hallucination.hpp"

#include <algorithm>
#include <string_view>
#include <unordered_map>

#include "csfilter/error.hpp"

namespace csfilter {

namespace {

struct WindowHash {
  std::size_t operator()(std::string_view key) const { return std::hash<std::string_view>{}(key); }
};

struct Occurrences {
  std::size_t count = 0;
  std::size_t next_free = 0;  // first start position not overlapping the last counted occurrence
};

std::size_t threshold_count(const NgramConfig& cfg) { return cfg.strictly_greater ? cfg.c + 1 : cfg.c; }

template <typename Interned>
std::vector<std::size_t> intern(std::span<const Interned> items) {
  std::unordered_map<std::string_view, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(items.size());
  for (const auto& it : items) {
    std::string_view s;
    if constexpr (std::is_same_v<Interned, Token>) {
      s = it.surface;
    } else {
      s = it;
    }
    out.push_back(ids.emplace(s, ids.size()).first->second);
  }
  return out;
}

// Scans windows until some n-gram reaches `stop_at` occurrences (0 = never stop).
std::size_t scan(std::span<const std::size_t> ids, std::size_t n, bool overlapping, std::size_t stop_at) {
  if (n == 0 || ids.size() < n) return 0;
  std::unordered_map<std::string_view, Occurrences, WindowHash> seen;
  const std::string_view bytes(reinterpret_cast<const char*>(ids.data()), ids.size() * sizeof(std::size_t));
  std::size_t best = 0;
  for (std::size_t pos = 0; pos + n <= ids.size(); ++pos) {
    auto& occ = seen[bytes.substr(pos * sizeof(std::size_t), n * sizeof(std::size_t))];
    if (!overlapping && pos < occ.next_free) continue;
    ++occ.count;
    occ.next_free = pos + n;
    best = std::max(best, occ.count);
    if (stop_at != 0 && best >= stop_at) break;
  }
  return best;
}

}  // namespace

void NgramConfig::validate() const {
  if (n < 1) throw ValidationError("ngram.n must be >= 1");
  if (c < 1) throw ValidationError("ngram.c must be >= 1");
}

std::size_t max_ngram_count(std::span<const std::size_t> ids, std::size_t n, bool overlapping) {
  return scan(ids, n, overlapping, 0);
}

bool detect(const TokenSequence& seq, const NgramConfig& cfg) {
  cfg.validate();
  const auto ids = intern(std::span<const Token>(seq.tokens));
  const std::size_t need = threshold_count(cfg);
  return scan(ids, cfg.n, cfg.overlapping, need) >= need;
}

bool detect(std::span<const std::string> tokens, const NgramConfig& cfg) {
  cfg.validate();
  const auto ids = intern(tokens);
  const std::size_t need = threshold_count(cfg);
  return scan(ids, cfg.n, cfg.overlapping, need) >= need;
}

TextField parse_text_field(std::string_view name) {
  if (name == "teacher_text") return TextField::teacher_text;
  if (name == "validator_text") return TextField::validator_text;
  if (name == "reference_text") return TextField::reference_text;
  if (name == "hypothesis") return TextField::hypothesis;
  throw ValidationError("unknown text field \"" + std::string(name) + "\"");
}

const char* to_string(TextField field) {
  switch (field) {
    case TextField::teacher_text:
      return "teacher_text";
    case TextField::validator_text:
      return "validator_text";
    case TextField::reference_text:
      return "reference_text";
    case TextField::hypothesis:
      return "hypothesis";
  }
  return "teacher_text";
}

RepetitionCount count_repetitive(std::span<const Chunk> chunks, TextField field, const NgramConfig& cfg,
                                 const TextConfig& text,
                                 const std::unordered_map<std::string, std::string>* hypotheses) {
  cfg.validate();
  RepetitionCount out;
  for (const auto& c : chunks) {
    const std::string* src = nullptr;
    switch (field) {
      case TextField::teacher_text:
        src = &c.teacher_text;
        break;
      case TextField::validator_text:
        src = c.validator_text ? &*c.validator_text : nullptr;
        break;
      case TextField::reference_text:
        src = c.reference_text ? &*c.reference_text : nullptr;
        break;
      case TextField::hypothesis:
        if (hypotheses != nullptr) {
          auto it = hypotheses->find(c.id);
          if (it != hypotheses->end()) src = &it->second;
        }
        break;
    }
    if (src == nullptr) {
      ++out.skipped;
      continue;
    }
    ++out.scanned;
    if (detect(prepare_tokens(*src, text), cfg)) ++out.detected;
  }
  return out;
}

}  // namespace csfilter
