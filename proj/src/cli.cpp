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

#include "csfilter/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "csfilter/config.hpp"
#include "csfilter/digest.hpp"
#include "csfilter/error.hpp"
#include "csfilter/evaluation.hpp"
#include "csfilter/kdloss.hpp"

namespace csfilter {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

const std::vector<std::string> kMethodNames = {"full_data", "trivial", "direct_mer", "direct_per", "composite"};

struct Options {
  std::string command;
  std::string input;
  std::string config;
  std::string out;
  std::string decisions;
  std::string hyp;
  std::string timings;
  std::string baseline_report;
  std::string truth;
  std::vector<std::string> methods;
  std::vector<std::string> sets;
  double alpha = 0.0;
  std::size_t ngram_n = 0;
  std::size_t ngram_c = 0;
  unsigned workers = 0;
  std::uint64_t seed = 0;
  std::size_t chunks = 0;
  double hallucination_rate = 0.0;
  double repeat_share = 0.0;
  double noisy_rate = 0.0;
  double validator_hallucination_rate = 0.0;

  // Options given on the command line, by long name.
  std::map<std::string, bool> given;
  bool has(const std::string& name) const { return given.count(name) > 0; }
};

struct InputFile {
  std::string role;
  fs::path path;
};

// ---------------------------------------------------------------- formatting

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::size_t display_width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    row.resize(header_.size());
    rows_.push_back(std::move(row));
  }

  std::string render() const {
    std::vector<std::size_t> width(header_.size());
    for (std::size_t c = 0; c < header_.size(); ++c) {
      width[c] = display_width(header_[c]);
      for (const auto& r : rows_) width[c] = std::max(width[c], display_width(r[c]));
    }
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      std::string s;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        const std::string pad(width[c] - display_width(cells[c]), ' ');
        if (c > 0) s += "  ";
        s += c == 0 ? cells[c] + pad : pad + cells[c];
      }
      while (!s.empty() && s.back() == ' ') s.pop_back();
      out += s + "\n";
    };
    line(header_);
    std::vector<std::string> rule;
    for (auto w : width) rule.emplace_back(w, '-');
    line(rule);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// ----------------------------------------------------------------------- I/O

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  f << content;
  f.close();
  if (!f) throw IoError("write failed: " + path.string());
}

fs::path with_suffix(const std::string& base, const char* suffix) { return fs::path(base + suffix); }

// Reader errors carry a line number but not the file; add it.
template <typename F>
auto reading(const fs::path& path, F&& f) {
  try {
    return f();
  } catch (const IoError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(path.filename().string() + ": " + e.what());
  }
}

ojson inputs_json(const std::vector<InputFile>& inputs) {
  auto arr = ojson::array();
  for (const auto& in : inputs) {
    arr.push_back({{"role", in.role}, {"file", in.path.filename().string()}, {"sha256", sha256_file(in.path)}});
  }
  return arr;
}

ojson envelope(const Options& o, const PipelineConfig& cfg, const std::vector<InputFile>& inputs) {
  ojson j;
  j["tool"] = "csfilter";
  j["version"] = CSFILTER_VERSION;
  j["command"] = o.command;
  j["config"] = cfg.to_json();
  j["inputs"] = inputs_json(inputs);
  return j;
}

std::string text_header(const ojson& env) {
  std::string s = "csfilter " + env["version"].get<std::string>() + "  " + env["command"].get<std::string>() + "\n";
  for (const auto& in : env["inputs"]) {
    s += "  " + in["role"].get<std::string>() + ": " + in["file"].get<std::string>() + "  sha256 " +
         in["sha256"].get<std::string>() + "\n";
  }
  return s + "\n";
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

// -------------------------------------------------------------------- config

PipelineConfig resolve_config(const Options& o, std::vector<InputFile>& inputs) {
  std::string path = o.config;
  if (path.empty()) {
    if (const char* env = std::getenv("CSFILTER_CONFIG"); env != nullptr) path = env;
  }
  PipelineConfig cfg;
  if (!path.empty()) {
    cfg = reading(path, [&] { return load_config(path); });
    inputs.push_back({"config", path});
  }
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got \"" + s + "\"");
    cfg.set(std::string_view(s).substr(0, eq), std::string_view(s).substr(eq + 1));
  }
  if (o.has("workers")) cfg.workers = o.workers;
  if (o.has("seed")) cfg.seed = o.seed;
  if (o.has("ngram-n")) cfg.ngram.n = o.ngram_n;
  if (o.has("ngram-c")) cfg.ngram.c = o.ngram_c;
  if (o.has("alpha")) cfg.alpha = o.alpha;
  if (o.has("method")) {
    if (o.command == "analyze") {
      cfg.analysis_methods.clear();
      for (const auto& m : o.methods) cfg.analysis_methods.push_back(parse_filter_method(m));
    } else {
      cfg.method = parse_filter_method(o.methods.back());
    }
  }
  if (o.has("chunks")) cfg.synth.chunks = o.chunks;
  if (o.has("hallucination-rate")) cfg.synth.hallucination_rate = o.hallucination_rate;
  if (o.has("repeat-share")) cfg.synth.repeat_share = o.repeat_share;
  if (o.has("noisy-rate")) cfg.synth.noisy_rate = o.noisy_rate;
  if (o.has("validator-hallucination-rate")) cfg.synth.validator_hallucination_rate = o.validator_hallucination_rate;
  cfg.validate();
  return cfg;
}

Lexicon load_lexicons(const PipelineConfig& cfg, std::vector<InputFile>& inputs) {
  inputs.push_back({"english_lexicon", cfg.english_lexicon()});
  inputs.push_back({"mandarin_lexicon", cfg.mandarin_lexicon()});
  return load_lexicon_files(cfg.english_lexicon(), cfg.mandarin_lexicon());
}

std::vector<Chunk> read_chunk_input(const Options& o, const PipelineConfig& cfg, std::vector<InputFile>& inputs) {
  ManifestReadOptions opts;
  opts.max_chunk_s = cfg.chunker.max_chunk_s;
  auto chunks = reading(o.input, [&] { return load_chunks(o.input, opts); });
  inputs.insert(inputs.begin(), {"chunks", o.input});
  return chunks;
}

// ------------------------------------------------------------------ commands

int cmd_chunk(const Options& o, PipelineConfig& cfg, std::vector<InputFile>& inputs, std::ostream& out) {
  const auto recs = reading(o.input, [&] { return load_recordings(o.input); });
  inputs.insert(inputs.begin(), {"recordings", o.input});
  const auto chunks = chunk_corpus(recs, cfg.chunker, cfg.resolved_workers());

  std::size_t segments = 0;
  std::size_t dropped = 0;
  double segment_s = 0.0;
  const auto limit_ms = std::llround(cfg.chunker.max_chunk_s * 1000.0);
  for (const auto& r : recs) {
    segments += r.segments.size();
    for (const auto& s : r.segments) {
      segment_s += s.duration_s();
      if (cfg.chunker.oversize_policy == OversizePolicy::drop &&
          std::llround(s.end_s * 1000.0) - std::llround(s.start_s * 1000.0) > limit_ms) {
        ++dropped;
      }
    }
  }
  std::size_t oversize = 0;
  double chunk_s = 0.0;
  double max_s = 0.0;
  for (const auto& c : chunks) {
    oversize += c.oversize;
    chunk_s += c.duration_s;
    max_s = std::max(max_s, c.duration_s);
  }
  const double mean_s = chunks.empty() ? 0.0 : chunk_s / static_cast<double>(chunks.size());

  ojson report = envelope(o, cfg, inputs);
  report["stats"] = {{"recordings", recs.size()},
                     {"segments", segments},
                     {"chunks", chunks.size()},
                     {"oversize_chunks", oversize},
                     {"dropped_segments", dropped},
                     {"segment_duration_s", quantize_seconds(segment_s)},
                     {"chunk_duration_s", quantize_seconds(chunk_s)},
                     {"mean_chunk_duration_s", quantize_seconds(mean_s)},
                     {"max_chunk_duration_s", max_s}};

  Table t({"quantity", "value"});
  t.add({"recordings", std::to_string(recs.size())});
  t.add({"segments", std::to_string(segments)});
  t.add({"chunks", std::to_string(chunks.size())});
  t.add({"oversize chunks", std::to_string(oversize)});
  t.add({"dropped segments", std::to_string(dropped)});
  t.add({"segment audio (s)", fixed(segment_s, 3)});
  t.add({"chunk span (s)", fixed(chunk_s, 3)});
  t.add({"mean chunk (s)", fixed(mean_s, 3)});
  t.add({"max chunk (s)", fixed(max_s, 3)});
  const std::string text = text_header(report) + t.render();

  save_manifest(chunks, o.out);
  write_file(with_suffix(o.out, ".stats.json"), dump(report));
  write_file(with_suffix(o.out, ".stats.txt"), text);
  out << text;
  return kExitOk;
}

int cmd_filter(const Options& o, PipelineConfig& cfg, std::vector<InputFile>& inputs, std::ostream& out) {
  const auto chunks = read_chunk_input(o, cfg, inputs);
  const FilterConfig fc = cfg.filter();
  std::optional<Lexicon> lex;
  if (requires_lexicon(fc.method)) lex = load_lexicons(cfg, inputs);
  const auto result = run_filter(chunks, fc, lex ? &*lex : nullptr);

  std::size_t flagged_teacher = 0;
  std::size_t flagged_validator = 0;
  std::size_t above_alpha = 0;
  std::string decisions;
  for (const auto& d : result.decisions) {
    flagged_teacher += d.h_teacher.value_or(0) == 1;
    flagged_validator += d.h_validator.value_or(0) == 1;
    above_alpha += !d.kept && d.delta && !(d.h_teacher.value_or(0) == 1);
    decisions += to_json(d).dump() + "\n";
  }

  const auto& s = result.stats;
  ojson report = envelope(o, cfg, inputs);
  report["method"] = to_string(fc.method);
  report["alpha"] = uses_threshold(fc.method) ? ojson(fc.alpha) : ojson(nullptr);
  report["stats"] = {{"total_chunks", s.total_chunks},
                     {"kept_chunks", s.kept_chunks},
                     {"dropped_chunks", s.total_chunks - s.kept_chunks},
                     {"total_duration_s", s.total_duration_s},
                     {"kept_duration_s", s.kept_duration_s},
                     {"retention_rate", s.retention_rate},
                     {"count_retention_rate", s.count_retention_rate},
                     {"teacher_flagged", flagged_teacher},
                     {"validator_flagged", flagged_validator},
                     {"dropped_above_alpha", above_alpha}};

  Table t({"method", "alpha", "chunks", "kept", "retention (dur)", "retention (count)"});
  t.add({to_string(fc.method), uses_threshold(fc.method) ? fixed(fc.alpha, 2) : "-", std::to_string(s.total_chunks),
         std::to_string(s.kept_chunks), fixed(100.0 * s.retention_rate, 2) + "%",
         fixed(100.0 * s.count_retention_rate, 2) + "%"});
  Table why({"drop reason", "chunks"});
  why.add({"teacher n-gram flag", std::to_string(flagged_teacher)});
  why.add({"validator n-gram flag", std::to_string(flagged_validator)});
  why.add({"distance above alpha", std::to_string(above_alpha)});
  const std::string text = text_header(report) + t.render() + "\n" + why.render();

  save_manifest(result.kept, o.out);
  write_file(o.decisions.empty() ? with_suffix(o.out, ".decisions.jsonl") : fs::path(o.decisions), decisions);
  write_file(with_suffix(o.out, ".stats.json"), dump(report));
  write_file(with_suffix(o.out, ".stats.txt"), text);
  out << text;
  return kExitOk;
}

ojson rate_json(const ErrorRate& r, const ErrorCounts& c) {
  ojson j = {{"rate", r.rate},
             {"errors", c.errors()},
             {"ref_len", c.ref_len},
             {"deletions", c.deletions},
             {"insertions", c.insertions},
             {"substitutions", c.substitutions}};
  if (r.degenerate) j["degenerate"] = true;
  if (r.absent) j["absent"] = true;
  return j;
}

int cmd_eval(const Options& o, PipelineConfig& cfg, std::vector<InputFile>& inputs, std::ostream& out) {
  const auto chunks = read_chunk_input(o, cfg, inputs);
  const auto hyps = load_hypotheses(o.hyp);
  inputs.push_back({"hypotheses", o.hyp});
  std::optional<std::vector<TimingRecord>> timings;
  if (!o.timings.empty()) {
    timings = load_timings(o.timings);
    inputs.push_back({"timings", o.timings});
  }
  std::optional<double> baseline_mer;
  if (!o.baseline_report.empty()) {
    std::ifstream in(o.baseline_report);
    if (!in) throw IoError("cannot open " + o.baseline_report);
    try {
      const auto j = nlohmann::json::parse(in);
      baseline_mer = j.at("corpus").at("mer").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(fs::path(o.baseline_report).filename().string() +
                            ": not an eval report with corpus.mer: " + e.what());
    }
    inputs.push_back({"baseline_report", o.baseline_report});
  }

  const auto e = evaluate(chunks, hyps, cfg.text(), cfg.ngram, cfg.resolved_workers());

  ojson report = envelope(o, cfg, inputs);
  report["corpus"] = {{"chunks", e.chunks},
                      {"ref_tokens", e.total.ref_len},
                      {"hyp_tokens", e.hyp_tokens},
                      {"matches", e.total.matches},
                      {"deletions", e.total.deletions},
                      {"insertions", e.total.insertions},
                      {"substitutions", e.total.substitutions},
                      {"errors", e.total.errors()},
                      {"mer", e.mer.rate},
                      {"mer_percent", e.mer_pct},
                      {"del_percent", e.del_pct},
                      {"ins_percent", e.ins_pct},
                      {"sub_percent", e.sub_pct}};
  report["per_language"] = {{"mandarin_cer", rate_json(e.mandarin_cer, e.languages.mandarin)},
                            {"english_wer", rate_json(e.english_wer, e.languages.english)}};
  report["repetition"] = {{"detected", e.repetition.detected}, {"scanned", e.repetition.scanned}};

  Table t({"MER", "Del.", "Ins.", "Sub.", "zh CER", "en WER", "Rep. Counts"});
  t.add({fixed(e.mer_pct, 2), fixed(e.del_pct, 2), fixed(e.ins_pct, 2), fixed(e.sub_pct, 2),
         e.mandarin_cer.absent ? "-" : fixed(100.0 * e.mandarin_cer.rate, 2),
         e.english_wer.absent ? "-" : fixed(100.0 * e.english_wer.rate, 2), std::to_string(e.repetition.detected)});
  std::string text = text_header(report) + t.render();

  if (baseline_mer) {
    const double merr = mix_error_reduction(e.mer.rate, *baseline_mer);
    report["merr"] = {{"baseline_mer", *baseline_mer}, {"mer", e.mer.rate}, {"merr_percent", merr}};
    Table m({"baseline MER", "MER", "MERR"});
    m.add({fixed(100.0 * *baseline_mer, 2), fixed(e.mer_pct, 2), fixed(merr, 2) + "%"});
    text += "\n" + m.render();
  }
  if (timings) {
    const auto rows = summarize_timings(*timings, cfg.timing_baseline);
    auto arr = ojson::array();
    Table rt({"system", "runs", "audio (s)", "processing (s)", "RTF", "speed-up"});
    for (const auto& r : rows) {
      arr.push_back({{"system_label", r.label},
                     {"runs", r.runs},
                     {"audio_s", r.audio_s},
                     {"processing_s", r.processing_s},
                     {"mean_rtf", r.mean_rtf},
                     {"speedup", r.speedup}});
      rt.add({r.label, std::to_string(r.runs), fixed(r.audio_s, 2), fixed(r.processing_s, 2), fixed(r.mean_rtf, 4),
              "x" + fixed(r.speedup, 2)});
    }
    report["timings"] = {{"baseline", rows.empty() ? "" : (cfg.timing_baseline.empty() ? rows.front().label
                                                                                          : cfg.timing_baseline)},
                         {"systems", std::move(arr)}};
    text += "\n" + rt.render();
  }

  if (!o.out.empty()) {
    write_file(o.out, dump(report));
    write_file(with_suffix(o.out, ".txt"), text);
  }
  out << text;
  return kExitOk;
}

int cmd_analyze(const Options& o, PipelineConfig& cfg, std::vector<InputFile>& inputs, std::ostream& out) {
  const auto chunks = read_chunk_input(o, cfg, inputs);
  std::optional<Lexicon> lex;
  for (auto m : cfg.analysis_methods) {
    if (requires_lexicon(m) && !lex) lex = load_lexicons(cfg, inputs);
  }
  if (chunks.empty()) throw ValidationError("no chunks to analyze");
  const FilterConfig base = cfg.filter();
  const auto labels = label_high_mer(chunks, cfg.analysis.high_mer_threshold, base.text, base.workers);
  std::vector<RecallReport> reports;
  for (auto m : cfg.analysis_methods) {
    reports.push_back(recall_sweep(chunks, labels, m, cfg.analysis, lex ? &*lex : nullptr, base));
  }

  ojson report = envelope(o, cfg, inputs);
  report["alphas"] = reports.front().alphas;
  report["high_mer_threshold"] = cfg.analysis.high_mer_threshold;
  report["high_mer_chunks"] = reports.front().per_alpha.front().high_mer_total;
  report["total_chunks"] = chunks.size();
  auto arr = ojson::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  report["reports"] = std::move(arr);

  Table summary({"Method", "Max Recall", "alpha", "Avg. Recall"});
  for (const auto& r : reports) {
    summary.add({to_string(r.method), r.max_recall ? fixed(100.0 * *r.max_recall, 2) : "-",
                 r.max_recall_alpha ? fixed(*r.max_recall_alpha, 2) : "-", fixed(100.0 * r.avg_recall, 2)});
  }
  std::vector<std::string> header = {"alpha"};
  for (const auto& r : reports) header.push_back(std::string(to_string(r.method)) + " recall/kept");
  Table grid(header);
  for (std::size_t i = 0; i < reports.front().alphas.size(); ++i) {
    std::vector<std::string> row = {fixed(reports.front().alphas[i], 2)};
    for (const auto& r : reports) {
      const auto& p = r.per_alpha[i];
      row.push_back(fixed(100.0 * p.recall, 2) + " / " + fixed(100.0 * p.retention, 2));
    }
    grid.add(std::move(row));
  }
  const std::string text = text_header(report) + "high-MER chunks: " +
                           std::to_string(report["high_mer_chunks"].get<std::size_t>()) + " of " +
                           std::to_string(chunks.size()) + " (MER > " + fixed(cfg.analysis.high_mer_threshold, 2) +
                           ")\n\n" + summary.render() + "\n" + grid.render();

  if (!o.out.empty()) {
    write_file(o.out, dump(report));
    write_file(with_suffix(o.out, ".txt"), text);
  }
  out << text;
  return kExitOk;
}

kd::DistributionSequenced matrix_field(const nlohmann::json& j, const char* key, Eigen::Index k, Eigen::Index v,
                                       std::size_t line) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_array()) throw ParseError(line, std::string("\"") + key + "\" must be an array");
  if (static_cast<Eigen::Index>(it->size()) != k) {
    throw ParseError(line, std::string("\"") + key + "\" has " + std::to_string(it->size()) + " rows, expected " +
                               std::to_string(k));
  }
  kd::DistributionSequenced m(k, v);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& row = (*it)[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != v) {
      throw ParseError(line, std::string("\"") + key + "\" row " + std::to_string(i) + " must have " +
                                 std::to_string(v) + " numbers");
    }
    for (Eigen::Index c = 0; c < v; ++c) {
      const auto& x = row[static_cast<std::size_t>(c)];
      if (!x.is_number()) throw ParseError(line, std::string("\"") + key + "\" holds a non-number");
      m(i, c) = x.get<double>();
    }
  }
  return m;
}

int cmd_kdcheck(const Options& o, PipelineConfig& cfg, std::vector<InputFile>& inputs, std::ostream& out) {
  std::ifstream in(o.input);
  if (!in) throw IoError("cannot open " + o.input);
  inputs.insert(inputs.begin(), {"fixture", o.input});

  struct Item {
    std::string id;
    Eigen::Index k = 0;
    Eigen::Index v = 0;
    kd::KDLoss<double> loss;
  };
  std::vector<Item> items;
  reading(o.input, [&] {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
      }
      if (!j.is_object()) throw ParseError(line_no, "record is not a JSON object");
      for (const auto& [key, _] : j.items()) {
        if (key != "id" && key != "k" && key != "v" && key != "teacher" && key != "student" && key != "targets") {
          throw ParseError(line_no, "unknown key \"" + key + "\"");
        }
      }
      Item item;
      item.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : std::to_string(items.size());
      if (!j.contains("k") || !j["k"].is_number_unsigned() || !j.contains("v") || !j["v"].is_number_unsigned()) {
        throw ParseError(line_no, "\"k\" and \"v\" must be non-negative integers");
      }
      item.k = j["k"].get<Eigen::Index>();
      item.v = j["v"].get<Eigen::Index>();
      if (item.v == 0) throw ParseError(line_no, "\"v\" must be positive");
      const auto teacher = matrix_field(j, "teacher", item.k, item.v, line_no);
      const auto student = matrix_field(j, "student", item.k, item.v, line_no);
      if (!j.contains("targets") || !j["targets"].is_array() ||
          static_cast<Eigen::Index>(j["targets"].size()) != item.k) {
        throw ParseError(line_no, "\"targets\" must hold k integers");
      }
      kd::TargetSequence targets(item.k);
      for (Eigen::Index i = 0; i < item.k; ++i) {
        const auto& t = j["targets"][static_cast<std::size_t>(i)];
        if (!t.is_number_integer()) throw ParseError(line_no, "\"targets\" must hold integers");
        targets(i) = t.get<Eigen::Index>();
      }
      try {
        kd::check_distributions(teacher, "teacher");
        kd::check_distributions(student, "student");
        item.loss = kd::kd_loss(student, teacher, targets, cfg.kdloss);
      } catch (const ValidationError& e) {
        throw ParseError(line_no, e.what());
      }
      items.push_back(std::move(item));
    }
    if (in.bad()) throw IoError("read failed: " + o.input);
    return 0;
  });

  double total = 0.0;
  double ce = 0.0;
  double kl = 0.0;
  Eigen::Index positions = 0;
  auto arr = ojson::array();
  Table t({"id", "k", "v", "CE", "KL", "total"});
  for (const auto& it : items) {
    total += it.loss.total;
    ce += it.loss.ce;
    kl += it.loss.kl;
    positions += it.loss.positions;
    arr.push_back({{"id", it.id},
                   {"k", it.k},
                   {"v", it.v},
                   {"ce", it.loss.ce},
                   {"kl", it.loss.kl},
                   {"total", it.loss.total}});
    t.add({it.id, std::to_string(it.k), std::to_string(it.v), fixed(it.loss.ce, 6), fixed(it.loss.kl, 6),
           fixed(it.loss.total, 6)});
  }
  t.add({"sum", std::to_string(positions), "", fixed(ce, 6), fixed(kl, 6), fixed(total, 6)});

  ojson report = envelope(o, cfg, inputs);
  report["items"] = std::move(arr);
  report["sum"] = {{"positions", positions}, {"ce", ce}, {"kl", kl}, {"total", total}};
  const std::string text = text_header(report) + t.render();
  if (!o.out.empty()) {
    write_file(o.out, dump(report));
    write_file(with_suffix(o.out, ".txt"), text);
  }
  out << text;
  return kExitOk;
}

int cmd_synth(const Options& o, PipelineConfig& cfg, std::vector<InputFile>& inputs, std::ostream& out) {
  const Lexicon lex = load_lexicons(cfg, inputs);
  const auto corpus = synthesize(cfg.synth, cfg.seed, lex, cfg.ngram, cfg.text());

  std::map<std::string, std::size_t> by_category;
  for (auto c : {SynthCategory::clean, SynthCategory::teacher_loop, SynthCategory::teacher_repeat,
                 SynthCategory::noisy, SynthCategory::validator_loop}) {
    by_category[to_string(c)] = 0;
  }
  std::string truth;
  std::size_t teacher_h = 0;
  std::size_t high_mer = 0;
  for (const auto& t : corpus.truth) {
    ++by_category[to_string(t.category)];
    teacher_h += t.teacher_hallucinated;
    high_mer += t.teacher_mer > cfg.analysis.high_mer_threshold;
    truth += to_json(t).dump() + "\n";
  }

  ojson report = envelope(o, cfg, inputs);
  ojson cats;
  for (const auto& [k, v] : by_category) cats[k] = v;
  report["stats"] = {{"chunks", corpus.chunks.size()},
                     {"teacher_hallucinated", teacher_h},
                     {"high_mer", high_mer},
                     {"categories", std::move(cats)}};
  Table t({"category", "chunks"});
  for (const auto& [k, v] : by_category) t.add({k, std::to_string(v)});
  t.add({"teacher hallucinated", std::to_string(teacher_h)});
  t.add({"teacher MER > " + fixed(cfg.analysis.high_mer_threshold, 2), std::to_string(high_mer)});
  const std::string text = text_header(report) + t.render();

  save_manifest(corpus.chunks, o.out);
  write_file(o.truth.empty() ? with_suffix(o.out, ".truth.jsonl") : fs::path(o.truth), truth);
  write_file(with_suffix(o.out, ".stats.json"), dump(report));
  write_file(with_suffix(o.out, ".stats.txt"), text);
  out << text;
  return kExitOk;
}

// ------------------------------------------------------------------- parsing

struct Command {
  CLI::App* app;
  int (*run)(const Options&, PipelineConfig&, std::vector<InputFile>&, std::ostream&);
};

void track(Options& o, CLI::Option* opt, const std::string& name) {
  opt->each([&o, name](const std::string&) { o.given[name] = true; });
}

void common_options(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "key = value config file (default: $CSFILTER_CONFIG)");
  sub->add_option("--set", o.sets, "override one config key, key=value (repeatable)");
  track(o, sub->add_option("--workers", o.workers, "worker threads, 0 = available parallelism"), "workers");
  track(o, sub->add_option("--seed", o.seed, "random seed"), "seed");
  track(o, sub->add_option("--ngram-n", o.ngram_n, "n-gram length for the repetition detector"), "ngram-n");
  track(o, sub->add_option("--ngram-c", o.ngram_c, "repetition count threshold"), "ngram-c");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Pseudo-label chunking, filtering and evaluation for code-switched speech corpora", "csfilter"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("csfilter ") + CSFILTER_VERSION);

  std::vector<Command> commands;

  auto* chunk = app.add_subcommand("chunk", "pack recording segments into chunks");
  chunk->add_option("recordings", o.input, "recordings manifest (JSONL)")->required();
  chunk->add_option("--out", o.out, "chunks manifest to write")->required();
  common_options(chunk, o);
  commands.push_back({chunk, cmd_chunk});

  auto* filter = app.add_subcommand("filter", "filter chunks by pseudo-label quality");
  filter->add_option("chunks", o.input, "chunks manifest (JSONL)")->required();
  filter->add_option("--out", o.out, "kept chunks manifest to write")->required();
  filter->add_option("--decisions", o.decisions, "decisions JSONL (default: OUT.decisions.jsonl)");
  track(o, filter->add_option("--method", o.methods, "filter method")->check(CLI::IsMember(kMethodNames)),
        "method");
  track(o, filter->add_option("--alpha", o.alpha, "distance threshold in [0, 1)"), "alpha");
  common_options(filter, o);
  commands.push_back({filter, cmd_filter});

  auto* eval = app.add_subcommand("eval", "score hypotheses against chunk references");
  eval->add_option("chunks", o.input, "chunks manifest with reference_text")->required();
  eval->add_option("--hyp", o.hyp, "hypotheses JSONL of {\"id\", \"text\"}")->required();
  eval->add_option("--timings", o.timings, "timings JSONL of {\"system_label\", \"audio_s\", \"processing_s\"}");
  eval->add_option("--baseline-report", o.baseline_report, "earlier eval report to compute MERR against");
  eval->add_option("--out", o.out, "report JSON to write (text table goes to OUT.txt)");
  common_options(eval, o);
  commands.push_back({eval, cmd_eval});

  auto* analyze = app.add_subcommand("analyze", "recall of high-MER labels across thresholds");
  analyze->add_option("chunks", o.input, "chunks manifest with validator and reference texts")->required();
  track(o, analyze->add_option("--method", o.methods, "method to sweep (repeatable)")->check(CLI::IsMember(kMethodNames)),
        "method");
  analyze->add_option("--out", o.out, "report JSON to write (text table goes to OUT.txt)");
  common_options(analyze, o);
  commands.push_back({analyze, cmd_analyze});

  auto* kdcheck = app.add_subcommand("kdcheck", "evaluate the distillation loss on fixture distributions");
  kdcheck->add_option("fixture", o.input, "JSONL of {\"k\", \"v\", \"teacher\", \"student\", \"targets\"}")->required();
  kdcheck->add_option("--out", o.out, "report JSON to write (text table goes to OUT.txt)");
  common_options(kdcheck, o);
  commands.push_back({kdcheck, cmd_kdcheck});

  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic chunk corpus");
  synth->add_option("--out", o.out, "chunks manifest to write")->required();
  synth->add_option("--truth", o.truth, "ground-truth JSONL (default: OUT.truth.jsonl)");
  track(o, synth->add_option("--chunks", o.chunks, "number of chunks"), "chunks");
  track(o, synth->add_option("--hallucination-rate", o.hallucination_rate, "share of looping teacher texts"),
        "hallucination-rate");
  track(o, synth->add_option("--repeat-share", o.repeat_share, "share of hallucinations repeated only twice"),
        "repeat-share");
  track(o, synth->add_option("--noisy-rate", o.noisy_rate, "share of high-MER teacher texts"), "noisy-rate");
  track(o,
        synth->add_option("--validator-hallucination-rate", o.validator_hallucination_rate,
                          "share of looping validator texts"),
        "validator-hallucination-rate");
  common_options(synth, o);
  commands.push_back({synth, cmd_synth});

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "csfilter " << CSFILTER_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  for (const auto& c : commands) {
    if (!c.app->parsed()) continue;
    o.command = c.app->get_name();
    try {
      std::vector<InputFile> inputs;
      PipelineConfig cfg = resolve_config(o, inputs);
      return c.run(o, cfg, inputs, out);
    } catch (const IoError& e) {
      err << "error: " << e.what() << "\n";
      return kExitIo;
    } catch (const fs::filesystem_error& e) {
      err << "error: " << e.what() << "\n";
      return kExitIo;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitValidation;
    }
  }
  err << app.help();
  return kExitValidation;
}

}  // namespace csfilter
