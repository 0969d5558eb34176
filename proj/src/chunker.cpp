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

#include "csfilter/chunker.hpp"

#include <cmath>
#include <cstdint>

#include "csfilter/error.hpp"
#include "csfilter/parallel.hpp"

namespace csfilter {

namespace {

std::int64_t to_ms(double seconds) { return std::llround(seconds * 1000.0); }
double from_ms(std::int64_t ms) { return static_cast<double>(ms) / 1000.0; }

struct OpenChunk {
  std::vector<const Segment*> segments;
  std::int64_t start_ms = 0;
  std::int64_t summed_ms = 0;

  bool empty() const { return segments.empty(); }
};

}  // namespace

OversizePolicy parse_oversize_policy(std::string_view name) {
  if (name == "flag") return OversizePolicy::flag;
  if (name == "drop") return OversizePolicy::drop;
  if (name == "error") return OversizePolicy::error;
  throw ValidationError("unknown oversize policy \"" + std::string(name) + "\"");
}

PackingMeasure parse_packing_measure(std::string_view name) {
  if (name == "span") return PackingMeasure::span;
  if (name == "summed") return PackingMeasure::summed;
  throw ValidationError("unknown packing measure \"" + std::string(name) + "\"");
}

const char* to_string(OversizePolicy p) {
  switch (p) {
    case OversizePolicy::flag:
      return "flag";
    case OversizePolicy::drop:
      return "drop";
    case OversizePolicy::error:
      return "error";
  }
  return "flag";
}

const char* to_string(PackingMeasure m) { return m == PackingMeasure::span ? "span" : "summed"; }

void ChunkerConfig::validate() const {
  if (!(max_chunk_s > 0.0) || !std::isfinite(max_chunk_s)) {
    throw ValidationError("chunker.max_chunk_s must be positive");
  }
}

std::vector<Chunk> chunk_recording(const Recording& rec, const ChunkerConfig& cfg) {
  cfg.validate();
  const std::int64_t limit = to_ms(cfg.max_chunk_s);
  std::vector<Chunk> out;
  OpenChunk open;

  auto finalize = [&] {
    if (open.empty()) return;
    const std::int64_t end_ms = to_ms(open.segments.back()->end_s);
    Chunk c;
    c.id = rec.id + "#" + std::to_string(out.size());
    c.recording_id = rec.id;
    c.start_s = from_ms(open.start_ms);
    c.end_s = from_ms(end_ms);
    c.duration_s = from_ms(end_ms - open.start_ms);
    for (const Segment* s : open.segments) {
      if (!c.teacher_text.empty()) c.teacher_text.push_back(' ');
      c.teacher_text += cfg.timestamp_format.format(from_ms(to_ms(s->start_s) - open.start_ms));
      c.teacher_text += s->text;
      c.teacher_text += cfg.timestamp_format.format(from_ms(to_ms(s->end_s) - open.start_ms));
    }
    c.oversize = end_ms - open.start_ms > limit;
    out.push_back(std::move(c));
    open = OpenChunk{};
  };

  for (std::size_t i = 0; i < rec.segments.size(); ++i) {
    const Segment& seg = rec.segments[i];
    const std::int64_t seg_start = to_ms(seg.start_s);
    const std::int64_t seg_end = to_ms(seg.end_s);
    const std::int64_t seg_len = seg_end - seg_start;

    if (seg_len > limit) {
      if (cfg.oversize_policy == OversizePolicy::error) {
        throw ValidationError("recording \"" + rec.id + "\": segment " + std::to_string(i) + " [" +
                              std::to_string(seg.start_s) + ", " + std::to_string(seg.end_s) +
                              "] exceeds max_chunk_s");
      }
      if (cfg.oversize_policy == OversizePolicy::drop) {
        finalize();
        continue;
      }
    }

    if (!open.empty()) {
      const std::int64_t grown =
          cfg.packing == PackingMeasure::span ? seg_end - open.start_ms : open.summed_ms + seg_len;
      if (grown > limit) finalize();
    }
    if (open.empty()) open.start_ms = seg_start;
    open.segments.push_back(&seg);
    open.summed_ms += seg_len;
  }
  finalize();
  return out;
}

std::vector<Chunk> chunk_corpus(std::span<const Recording> corpus, const ChunkerConfig& cfg, unsigned workers) {
  cfg.validate();
  std::vector<std::vector<Chunk>> parts(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) { parts[i] = chunk_recording(corpus[i], cfg); });
  std::vector<Chunk> out;
  for (auto& p : parts) {
    for (auto& c : p) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace csfilter
