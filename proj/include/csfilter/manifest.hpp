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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace csfilter {

/// One timestamped piece of a long-form teacher transcript.
struct Segment {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;

  double duration_s() const { return end_s - start_s; }
  bool operator==(const Segment&) const = default;
};

/// A long-form recording with its ordered, non-overlapping teacher segments.
struct Recording {
  std::string id;
  std::string audio_ref;
  double total_duration_s = 0.0;
  std::vector<Segment> segments;

  bool operator==(const Recording&) const = default;
};

/// A packed audio span with its pseudo-label and optional companion texts.
struct Chunk {
  std::string id;
  std::string recording_id;
  double start_s = 0.0;
  double end_s = 0.0;
  double duration_s = 0.0;
  std::string teacher_text;
  std::optional<std::string> validator_text;
  std::optional<std::string> reference_text;
  bool oversize = false;

  bool operator==(const Chunk&) const = default;
};

/// Count- and duration-based retention of a filtered corpus.
struct CorpusStats {
  std::size_t total_chunks = 0;
  double total_duration_s = 0.0;
  std::size_t kept_chunks = 0;
  double kept_duration_s = 0.0;
  double retention_rate = 0.0;        // duration weighted
  double count_retention_rate = 0.0;  // count weighted

  bool operator==(const CorpusStats&) const = default;
};

CorpusStats compute_stats(std::span<const Chunk> all, std::span<const Chunk> kept);

enum class ManifestSchema { recordings, chunks };

struct ManifestReadOptions {
  // Chunks longer than this must carry the oversize flag.
  double max_chunk_s = 30.0;
};

using Manifest = std::variant<std::vector<Recording>, std::vector<Chunk>>;

/// Rounds to millisecond resolution, the granularity manifests are stored at.
double quantize_seconds(double seconds);

void validate(const Recording& rec);
void validate(const Chunk& chunk, double max_chunk_s = 30.0);

Manifest read_manifest(std::istream& in, ManifestSchema schema, const ManifestReadOptions& opts = {});
std::vector<Recording> read_recordings(std::istream& in);
std::vector<Chunk> read_chunks(std::istream& in, const ManifestReadOptions& opts = {});

void write_manifest(std::span<const Recording> records, std::ostream& out);
void write_manifest(std::span<const Chunk> records, std::ostream& out);

std::string to_json_line(const Recording& rec);
std::string to_json_line(const Chunk& chunk);

// File helpers; open failures raise IoError.
std::vector<Recording> load_recordings(const std::filesystem::path& path);
std::vector<Chunk> load_chunks(const std::filesystem::path& path, const ManifestReadOptions& opts = {});
void save_manifest(std::span<const Recording> records, const std::filesystem::path& path);
void save_manifest(std::span<const Chunk> records, const std::filesystem::path& path);

}  // namespace csfilter
