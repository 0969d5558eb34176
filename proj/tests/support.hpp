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
#include <random>
#include <string>
#include <vector>

#include "csfilter/manifest.hpp"
#include "csfilter/phonemizer.hpp"

namespace csfilter::testing {

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20260101);
  return engine;
}

inline std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng()); }
inline int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }
inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline const Lexicon& bundled_lexicon() {
  static const Lexicon lex = load_lexicon_files(bundled_english_lexicon(), bundled_mandarin_lexicon());
  return lex;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("csfilter-" + tag + "-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Chunk make_chunk(std::string id, std::string teacher, std::optional<std::string> validator = std::nullopt,
                        std::optional<std::string> reference = std::nullopt, double duration = 10.0) {
  Chunk c;
  c.id = std::move(id);
  c.recording_id = "rec";
  c.start_s = 0.0;
  c.end_s = duration;
  c.duration_s = duration;
  c.teacher_text = std::move(teacher);
  c.validator_text = std::move(validator);
  c.reference_text = std::move(reference);
  return c;
}

/// Random recording with ms-aligned, sorted, gapped segments.
inline Recording random_recording(const std::string& id, int max_segments = 12, int max_len_ms = 32000) {
  Recording r;
  r.id = id;
  r.audio_ref = id + ".wav";
  std::int64_t t = between(0, 3000);
  const int n = between(0, max_segments);
  for (int i = 0; i < n; ++i) {
    const std::int64_t len = between(1, max_len_ms);
    Segment s;
    s.start_s = static_cast<double>(t) / 1000.0;
    s.end_s = static_cast<double>(t + len) / 1000.0;
    static const char* const kTexts[] = {"你好", "hello world", "我们用 python", "好的 ok", "数据 data 集", "测试"};
    s.text = kTexts[pick(std::size(kTexts))];
    r.segments.push_back(s);
    t += len + between(0, 4000);
  }
  r.total_duration_s = static_cast<double>(t) / 1000.0;
  return r;
}

}  // namespace csfilter::testing
