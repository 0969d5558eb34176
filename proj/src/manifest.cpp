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

#include "csfilter/manifest.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "csfilter/error.hpp"

namespace csfilter {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kMillis = 1000.0;

void require_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed, std::size_t line) {
  std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) throw ParseError(line, "unknown key \"" + key + "\"");
  }
}

template <typename T>
T field(const nlohmann::json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, std::string("missing key \"") + key + "\"");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(line, std::string("key \"") + key + "\" has the wrong type");
  }
}

double seconds_field(const nlohmann::json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, std::string("missing key \"") + key + "\"");
  if (!it->is_number()) throw ParseError(line, std::string("key \"") + key + "\" must be a number");
  double v = it->get<double>();
  if (!std::isfinite(v)) throw ParseError(line, std::string("key \"") + key + "\" is not finite");
  return quantize_seconds(v);
}

Recording parse_recording(const nlohmann::json& obj, std::size_t line) {
  if (!obj.is_object()) throw ParseError(line, "record is not a JSON object");
  require_keys(obj, {"id", "audio_ref", "total_duration_s", "segments"}, line);
  Recording rec;
  rec.id = field<std::string>(obj, "id", line);
  rec.audio_ref = field<std::string>(obj, "audio_ref", line);
  rec.total_duration_s = seconds_field(obj, "total_duration_s", line);
  auto segs = obj.find("segments");
  if (segs == obj.end() || !segs->is_array()) throw ParseError(line, "\"segments\" must be an array");
  rec.segments.reserve(segs->size());
  for (const auto& s : *segs) {
    if (!s.is_object()) throw ParseError(line, "segment is not a JSON object");
    require_keys(s, {"start_s", "end_s", "text"}, line);
    rec.segments.push_back({seconds_field(s, "start_s", line), seconds_field(s, "end_s", line),
                            field<std::string>(s, "text", line)});
  }
  return rec;
}

Chunk parse_chunk(const nlohmann::json& obj, std::size_t line) {
  if (!obj.is_object()) throw ParseError(line, "record is not a JSON object");
  require_keys(obj,
               {"id", "recording_id", "start_s", "end_s", "duration_s", "teacher_text", "validator_text",
                "reference_text", "oversize"},
               line);
  Chunk c;
  c.id = field<std::string>(obj, "id", line);
  c.recording_id = field<std::string>(obj, "recording_id", line);
  c.start_s = seconds_field(obj, "start_s", line);
  c.end_s = seconds_field(obj, "end_s", line);
  c.duration_s = seconds_field(obj, "duration_s", line);
  c.teacher_text = field<std::string>(obj, "teacher_text", line);
  if (obj.contains("validator_text")) c.validator_text = field<std::string>(obj, "validator_text", line);
  if (obj.contains("reference_text")) c.reference_text = field<std::string>(obj, "reference_text", line);
  if (obj.contains("oversize")) c.oversize = field<bool>(obj, "oversize", line);
  return c;
}

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

template <typename Record, typename Parse, typename Check>
std::vector<Record> read_lines(std::istream& in, Parse parse, Check check) {
  std::vector<Record> out;
  std::unordered_set<std::string> ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (blank(text)) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line, std::string("malformed JSON: ") + e.what());
    }
    Record rec = parse(obj, line);
    try {
      check(rec);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line) + ": " + e.what());
    }
    if (!ids.insert(rec.id).second) {
      throw ValidationError("line " + std::to_string(line) + ": duplicate id \"" + rec.id + "\"");
    }
    out.push_back(std::move(rec));
  }
  if (in.bad()) throw IoError("failed reading manifest stream");
  return out;
}

ordered_json to_json(const Recording& rec) {
  ordered_json segs = ordered_json::array();
  for (const auto& s : rec.segments) {
    segs.push_back({{"start_s", quantize_seconds(s.start_s)},
                    {"end_s", quantize_seconds(s.end_s)},
                    {"text", s.text}});
  }
  return {{"id", rec.id},
          {"audio_ref", rec.audio_ref},
          {"total_duration_s", quantize_seconds(rec.total_duration_s)},
          {"segments", std::move(segs)}};
}

ordered_json to_json(const Chunk& c) {
  ordered_json j = {{"id", c.id},
                    {"recording_id", c.recording_id},
                    {"start_s", quantize_seconds(c.start_s)},
                    {"end_s", quantize_seconds(c.end_s)},
                    {"duration_s", quantize_seconds(c.duration_s)},
                    {"teacher_text", c.teacher_text}};
  if (c.validator_text) j["validator_text"] = *c.validator_text;
  if (c.reference_text) j["reference_text"] = *c.reference_text;
  if (c.oversize) j["oversize"] = true;
  return j;
}

template <typename Record>
void write_lines(std::span<const Record> records, std::ostream& out) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
  if (!out) throw IoError("failed writing manifest stream");
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

double quantize_seconds(double seconds) { return std::round(seconds * kMillis) / kMillis; }

CorpusStats compute_stats(std::span<const Chunk> all, std::span<const Chunk> kept) {
  CorpusStats s;
  s.total_chunks = all.size();
  s.kept_chunks = kept.size();
  for (const auto& c : all) s.total_duration_s += c.duration_s;
  for (const auto& c : kept) s.kept_duration_s += c.duration_s;
  s.total_duration_s = quantize_seconds(s.total_duration_s);
  s.kept_duration_s = quantize_seconds(s.kept_duration_s);
  s.retention_rate = s.total_duration_s > 0 ? s.kept_duration_s / s.total_duration_s : 0.0;
  s.count_retention_rate =
      s.total_chunks > 0 ? static_cast<double>(s.kept_chunks) / static_cast<double>(s.total_chunks) : 0.0;
  return s;
}

void validate(const Recording& rec) {
  auto fail = [&](const std::string& why) { throw ValidationError("recording \"" + rec.id + "\": " + why); };
  if (rec.id.empty()) throw ValidationError("recording with empty id");
  if (rec.total_duration_s < 0) fail("total_duration_s is negative");
  const Segment* prev = nullptr;
  for (std::size_t i = 0; i < rec.segments.size(); ++i) {
    const auto& s = rec.segments[i];
    std::string where = "segment " + std::to_string(i) + " ";
    if (s.start_s < 0) fail(where + "starts before 0");
    if (!(s.end_s > s.start_s)) fail(where + "has end_s <= start_s");
    if (s.end_s > rec.total_duration_s) fail(where + "ends after total_duration_s");
    if (prev && s.start_s < prev->end_s) fail(where + "overlaps or precedes its predecessor");
    prev = &s;
  }
}

void validate(const Chunk& c, double max_chunk_s) {
  auto fail = [&](const std::string& why) { throw ValidationError("chunk \"" + c.id + "\": " + why); };
  if (c.id.empty()) throw ValidationError("chunk with empty id");
  if (c.start_s < 0) fail("start_s is negative");
  if (c.end_s < c.start_s) fail("end_s < start_s");
  if (quantize_seconds(c.end_s - c.start_s) != quantize_seconds(c.duration_s)) fail("duration_s != end_s - start_s");
  if (c.duration_s > max_chunk_s && !c.oversize) fail("longer than max chunk duration without oversize flag");
  if (c.teacher_text.empty()) fail("empty teacher_text");
}

std::vector<Recording> read_recordings(std::istream& in) {
  return read_lines<Recording>(in, parse_recording, [](const Recording& r) { validate(r); });
}

std::vector<Chunk> read_chunks(std::istream& in, const ManifestReadOptions& opts) {
  return read_lines<Chunk>(in, parse_chunk, [&](const Chunk& c) { validate(c, opts.max_chunk_s); });
}

Manifest read_manifest(std::istream& in, ManifestSchema schema, const ManifestReadOptions& opts) {
  if (schema == ManifestSchema::recordings) return read_recordings(in);
  return read_chunks(in, opts);
}

void write_manifest(std::span<const Recording> records, std::ostream& out) { write_lines(records, out); }
void write_manifest(std::span<const Chunk> records, std::ostream& out) { write_lines(records, out); }

std::string to_json_line(const Recording& rec) { return to_json(rec).dump(); }
std::string to_json_line(const Chunk& chunk) { return to_json(chunk).dump(); }

std::vector<Recording> load_recordings(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_recordings(in);
}

std::vector<Chunk> load_chunks(const std::filesystem::path& path, const ManifestReadOptions& opts) {
  auto in = open_in(path);
  return read_chunks(in, opts);
}

void save_manifest(std::span<const Recording> records, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_manifest(records, out);
}

void save_manifest(std::span<const Chunk> records, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_manifest(records, out);
}

}  // namespace csfilter
