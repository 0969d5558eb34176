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

#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "csfilter/chunker.hpp"
#include "csfilter/error.hpp"
#include "support.hpp"

using namespace csfilter;
using namespace csfilter::testing;

namespace {

Recording contiguous(const std::string& id, std::initializer_list<double> durations) {
  Recording r;
  r.id = id;
  r.audio_ref = id + ".wav";
  double t = 0.0;
  int k = 0;
  for (double d : durations) {
    r.segments.push_back({t, t + d, "s" + std::to_string(k++)});
    t += d;
  }
  r.total_duration_s = t;
  return r;
}

std::vector<double> durations(const std::vector<Chunk>& chunks) {
  std::vector<double> out;
  for (const auto& c : chunks) out.push_back(c.duration_s);
  return out;
}

std::string stamp(long long ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "<|%.2f|>", static_cast<double>(ms) / 1000.0);
  return buf;
}

}  // namespace

// Straight-line greedy packer by span, written against the chunk contract only.
std::vector<Chunk> reference_chunks(const Recording& rec, double max_s) {
  const long long limit = std::llround(max_s * 1000);
  std::vector<Chunk> out;
  std::vector<const Segment*> open;
  auto ms = [](double s) { return std::llround(s * 1000); };
  auto emit = [&] {
    if (open.empty()) return;
    const long long start = ms(open.front()->start_s);
    const long long end = ms(open.back()->end_s);
    Chunk c;
    c.id = rec.id + "#" + std::to_string(out.size());
    c.recording_id = rec.id;
    c.start_s = start / 1000.0;
    c.end_s = end / 1000.0;
    c.duration_s = (end - start) / 1000.0;
    c.oversize = end - start > limit;
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (i) c.teacher_text += " ";
      c.teacher_text += stamp(ms(open[i]->start_s) - start) + open[i]->text + stamp(ms(open[i]->end_s) - start);
    }
    out.push_back(c);
    open.clear();
  };
  for (const auto& s : rec.segments) {
    if (!open.empty() && ms(s.end_s) - ms(open.front()->start_s) > limit) emit();
    open.push_back(&s);
  }
  emit();
  return out;
}

TEST_SUITE("chunker") {
  TEST_CASE("packing examples") {
    const ChunkerConfig cfg;
    CHECK(durations(chunk_recording(contiguous("a", {10, 10, 10, 5}), cfg)) == std::vector<double>{30, 5});
    CHECK(durations(chunk_recording(contiguous("b", {20, 15}), cfg)) == std::vector<double>{20, 15});
    const auto big = chunk_recording(contiguous("c", {31}), cfg);
    REQUIRE(big.size() == 1);
    CHECK(big[0].duration_s == 31.0);
    CHECK(big[0].oversize);
  }

  TEST_CASE("oversize policies") {
    ChunkerConfig cfg;
    const Recording r = contiguous("r", {5, 40, 5});
    CHECK(durations(chunk_recording(r, cfg)) == std::vector<double>{5, 40, 5});
    cfg.oversize_policy = OversizePolicy::drop;
    const auto dropped = chunk_recording(r, cfg);
    CHECK(durations(dropped) == std::vector<double>{5, 5});
    CHECK(dropped[1].start_s == 45.0);
    cfg.oversize_policy = OversizePolicy::error;
    CHECK_THROWS_WITH_AS(chunk_recording(r, cfg), doctest::Contains("segment 1"), ValidationError);
  }

  TEST_CASE("chunk ids and text layout") {
    Recording a = contiguous("A", {3});
    Recording b = contiguous("B", {2});
    b.segments[0].text = "你好";
    const std::vector<Recording> corpus = {a, b};
    const auto chunks = chunk_corpus(corpus, ChunkerConfig{});
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].id == "A#0");
    CHECK(chunks[1].id == "B#0");
    CHECK(chunks[1].teacher_text == "<|0.00|>你好<|2.00|>");
    CHECK(chunk_corpus(std::vector<Recording>{}, ChunkerConfig{}).empty());
  }

  TEST_CASE("gaps count toward the span") {
    Recording r;
    r.id = "g";
    r.segments = {{0, 10, "x"}, {25, 35, "y"}};
    r.total_duration_s = 35;
    const auto chunks = chunk_recording(r, ChunkerConfig{});
    CHECK(chunks.size() == 2);
    ChunkerConfig summed;
    summed.packing = PackingMeasure::summed;
    const auto s = chunk_recording(r, summed);
    REQUIRE(s.size() == 1);
    CHECK(s[0].duration_s == 35.0);
    CHECK(s[0].oversize);
  }

  TEST_CASE("matches the straight-line reference on random recordings") {
    for (int i = 0; i < 50; ++i) {
      const Recording r = random_recording("r" + std::to_string(i));
      CHECK(chunk_recording(r, ChunkerConfig{}) == reference_chunks(r, 30.0));
    }
  }

  TEST_CASE("corpus output is the concatenation of per-recording output") {
    std::vector<Recording> corpus;
    for (int i = 0; i < 30; ++i) corpus.push_back(random_recording("u" + std::to_string(i)));
    std::vector<Chunk> expected;
    for (const auto& r : corpus) {
      auto part = chunk_recording(r, ChunkerConfig{});
      expected.insert(expected.end(), part.begin(), part.end());
    }
    CHECK(chunk_corpus(corpus, ChunkerConfig{}, 1) == expected);
    CHECK(chunk_corpus(corpus, ChunkerConfig{}, 4) == expected);
  }

  TEST_CASE("invalid configuration") {
    ChunkerConfig cfg;
    cfg.max_chunk_s = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    CHECK_THROWS_AS(parse_oversize_policy("shrink"), ValidationError);
    CHECK(parse_packing_measure("summed") == PackingMeasure::summed);
  }
}
