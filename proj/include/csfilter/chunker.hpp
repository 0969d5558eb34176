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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csfilter/manifest.hpp"
#include "csfilter/textnorm.hpp"

namespace csfilter {

enum class OversizePolicy { flag, drop, error };

/// How the running chunk length is measured while packing.
enum class PackingMeasure {
  span,    // first segment start to candidate segment end
  summed,  // sum of segment durations; chunks whose span exceeds the limit get flagged
};

OversizePolicy parse_oversize_policy(std::string_view name);
PackingMeasure parse_packing_measure(std::string_view name);
const char* to_string(OversizePolicy p);
const char* to_string(PackingMeasure m);

struct ChunkerConfig {
  double max_chunk_s = 30.0;
  OversizePolicy oversize_policy = OversizePolicy::flag;
  TimestampFormat timestamp_format;
  PackingMeasure packing = PackingMeasure::span;

  void validate() const;
};

/// Greedy left-to-right packing of a recording's segments into chunks.
///
/// A segment joins the open chunk when the chunk stays within max_chunk_s,
/// otherwise the open chunk is closed and the segment starts a new one.
/// Segments are never split. A segment longer than max_chunk_s is handled by
/// the oversize policy. Chunk ids are "{recording_id}#{k}".
///
/// teacher_text holds, per segment, a start token, the segment text and an end
/// token, with times relative to the chunk start; segment groups are joined by
/// a single space.
std::vector<Chunk> chunk_recording(const Recording& rec, const ChunkerConfig& cfg);

/// chunk_recording over a corpus, concatenated in corpus order. Output does
/// not depend on `workers`.
std::vector<Chunk> chunk_corpus(std::span<const Recording> corpus, const ChunkerConfig& cfg, unsigned workers = 1);

}  // namespace csfilter
