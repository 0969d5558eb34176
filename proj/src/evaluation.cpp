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

#include "csfilter/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "csfilter/error.hpp"
#include "csfilter/parallel.hpp"

namespace csfilter {

namespace {

nlohmann::json parse_object(const std::string& line, std::size_t line_no, std::initializer_list<const char*> keys) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError(line_no, "record is not a JSON object");
  for (const auto& [k, _] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) throw ParseError(line_no, "unknown key \"" + k + "\"");
  }
  return j;
}

template <typename F>
void for_each_line(std::istream& in, F&& f) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    f(line, line_no);
  }
  if (in.bad()) throw IoError("read failed");
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

template <typename T>
T field(const nlohmann::json& j, const char* key, std::size_t line_no) {
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(line_no, std::string("missing key \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(line_no, std::string("key \"") + key + "\" has the wrong type");
  }
}

double percent(std::size_t count, std::size_t ref_len) {
  return 100.0 * ErrorRate::from_counts(count, ref_len, RateKind::mer).rate;
}

}  // namespace

std::unordered_map<std::string, std::string> Hypotheses::by_id() const {
  return {entries.begin(), entries.end()};
}

Hypotheses read_hypotheses(std::istream& in) {
  Hypotheses h;
  std::unordered_set<std::string> seen;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    const auto j = parse_object(line, line_no, {"id", "text"});
    auto id = field<std::string>(j, "id", line_no);
    if (!seen.insert(id).second) throw ParseError(line_no, "duplicate id \"" + id + "\"");
    h.entries.emplace_back(std::move(id), field<std::string>(j, "text", line_no));
  });
  return h;
}

Hypotheses load_hypotheses(const std::filesystem::path& path) {
  auto in = open(path);
  try {
    return read_hypotheses(in);
  } catch (const ParseError& e) {
    throw ValidationError(path.filename().string() + ": " + e.what());
  }
}

std::string IdMismatch::describe(std::size_t max_listed) const {
  auto list = [&](const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size() && i < max_listed; ++i) s += (i ? ", " : "") + ids[i];
    if (ids.size() > max_listed) s += ", ... (" + std::to_string(ids.size() - max_listed) + " more)";
    return s;
  };
  std::string out = "hypothesis ids do not match chunk ids";
  if (!missing.empty()) out += "; missing hypotheses for: " + list(missing);
  if (!unexpected.empty()) out += "; hypotheses without a chunk: " + list(unexpected);
  return out;
}

IdMismatch match_ids(std::span<const Chunk> chunks, const Hypotheses& hyps) {
  IdMismatch m;
  std::unordered_set<std::string> hyp_ids;
  for (const auto& [id, _] : hyps.entries) hyp_ids.insert(id);
  std::unordered_set<std::string> chunk_ids;
  for (const auto& c : chunks) {
    chunk_ids.insert(c.id);
    if (!hyp_ids.contains(c.id)) m.missing.push_back(c.id);
  }
  for (const auto& [id, _] : hyps.entries) {
    if (!chunk_ids.contains(id)) m.unexpected.push_back(id);
  }
  return m;
}

CorpusEval evaluate(std::span<const Chunk> chunks, const Hypotheses& hyps, const TextConfig& text,
                    const NgramConfig& ngram, unsigned workers) {
  for (const auto& c : chunks) {
    if (!c.reference_text) throw ValidationError("chunk \"" + c.id + "\" has no reference_text");
  }
  const auto mismatch = match_ids(chunks, hyps);
  if (!mismatch.empty()) throw ValidationError(mismatch.describe());
  const auto by_id = hyps.by_id();

  struct PerChunk {
    ErrorCounts counts;
    LanguageCounts languages;
    std::size_t hyp_tokens = 0;
  };
  std::vector<PerChunk> parts(chunks.size());
  parallel_for(chunks.size(), workers, [&](std::size_t i) {
    const auto m = mer(*chunks[i].reference_text, by_id.at(chunks[i].id), text);
    parts[i].counts += m.alignment;
    parts[i].languages = attribute_languages(m);
    parts[i].hyp_tokens = m.hyp.size();
  });

  CorpusEval e;
  e.chunks = chunks.size();
  for (const auto& p : parts) {
    e.total += p.counts;
    e.languages.mandarin += p.languages.mandarin;
    e.languages.english += p.languages.english;
    e.languages.other += p.languages.other;
    e.hyp_tokens += p.hyp_tokens;
  }
  e.mer = e.total.rate(RateKind::mer);
  e.mandarin_cer = e.languages.mandarin.rate(RateKind::cer);
  e.english_wer = e.languages.english.rate(RateKind::wer);
  e.mer_pct = 100.0 * e.mer.rate;
  e.del_pct = percent(e.total.deletions, e.total.ref_len);
  e.ins_pct = percent(e.total.insertions, e.total.ref_len);
  e.sub_pct = percent(e.total.substitutions, e.total.ref_len);
  e.repetition = count_repetitive(chunks, TextField::hypothesis, ngram, text, &by_id);
  return e;
}

std::vector<TimingRecord> read_timings(std::istream& in) {
  std::vector<TimingRecord> out;
  for_each_line(in, [&](const std::string& line, std::size_t line_no) {
    const auto j = parse_object(line, line_no, {"system_label", "audio_s", "processing_s"});
    TimingRecord t;
    t.system_label = field<std::string>(j, "system_label", line_no);
    t.audio_s = field<double>(j, "audio_s", line_no);
    t.processing_s = field<double>(j, "processing_s", line_no);
    try {
      rtf(t);
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
    out.push_back(std::move(t));
  });
  return out;
}

std::vector<TimingRecord> load_timings(const std::filesystem::path& path) {
  auto in = open(path);
  try {
    return read_timings(in);
  } catch (const ParseError& e) {
    throw ValidationError(path.filename().string() + ": " + e.what());
  }
}

std::vector<SystemTiming> summarize_timings(std::span<const TimingRecord> runs, std::string_view baseline) {
  if (runs.empty()) throw ValidationError("no timing runs");
  std::vector<std::string> labels;
  for (const auto& r : runs) {
    if (std::find(labels.begin(), labels.end(), r.system_label) == labels.end()) labels.push_back(r.system_label);
  }
  std::vector<SystemTiming> out;
  for (const auto& label : labels) {
    std::vector<TimingRecord> mine;
    SystemTiming s;
    s.label = label;
    for (const auto& r : runs) {
      if (r.system_label != label) continue;
      mine.push_back(r);
      s.audio_s += r.audio_s;
      s.processing_s += r.processing_s;
    }
    s.runs = mine.size();
    s.mean_rtf = mean_rtf(mine);
    out.push_back(std::move(s));
  }
  const std::string base_label = baseline.empty() ? labels.front() : std::string(baseline);
  auto base = std::find_if(out.begin(), out.end(), [&](const SystemTiming& s) { return s.label == base_label; });
  if (base == out.end()) throw ValidationError("timing baseline \"" + base_label + "\" not found in timings");
  const double base_rtf = base->mean_rtf;
  for (auto& s : out) s.speedup = speedup(base_rtf, s.mean_rtf);
  return out;
}

double mix_error_reduction(double mer, double baseline_mer) {
  if (!(baseline_mer > 0.0)) throw ValidationError("baseline MER must be positive to compute MERR");
  return (mer - baseline_mer) / baseline_mer * 100.0;
}

}  // namespace csfilter
