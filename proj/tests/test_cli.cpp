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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "csfilter/cli.hpp"
#include "csfilter/manifest.hpp"
#include "support.hpp"

using namespace csfilter;
using namespace csfilter::testing;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

nlohmann::json json_of(const std::filesystem::path& p) { return nlohmann::json::parse(slurp(p)); }

std::string synth_corpus(const TempDir& dir, std::size_t chunks = 60) {
  const auto path = (dir / "syn.jsonl").string();
  const auto r = cli({"synth", "--out", path, "--chunks", std::to_string(chunks), "--seed", "5"});
  REQUIRE(r.code == 0);
  return path;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and usage") {
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"filter", "--help"}).out.find("--method") != std::string::npos);
    const auto none = cli({});
    CHECK(none.code == 1);
    CHECK(cli({"--version"}).out.find("csfilter") == 0);
  }

  TEST_CASE("chunk command") {
    TempDir dir("chunk");
    std::vector<Recording> recs;
    std::size_t segments = 0;
    for (int i = 0; i < 20; ++i) {
      recs.push_back(random_recording("rec" + std::to_string(i)));
      segments += recs.back().segments.size();
    }
    save_manifest(recs, dir / "recs.jsonl");
    const auto in = (dir / "recs.jsonl").string();
    const auto r = cli({"chunk", in, "--out", (dir / "a.jsonl").string()});
    REQUIRE(r.code == 0);
    const auto chunks = load_chunks(dir / "a.jsonl");
    CHECK(chunks.size() <= segments);
    const auto stats = json_of(dir / "a.jsonl.stats.json");
    CHECK(stats["stats"]["chunks"] == chunks.size());
    CHECK(stats["version"] == CSFILTER_VERSION);
    CHECK(stats["inputs"][0]["sha256"].get<std::string>().size() == 64);

    REQUIRE(cli({"chunk", in, "--out", (dir / "b.jsonl").string(), "--workers", "4"}).code == 0);
    CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));
    CHECK(slurp(dir / "a.jsonl.stats.json") == slurp(dir / "b.jsonl.stats.json"));
  }

  TEST_CASE("chunk errors map to exit codes") {
    TempDir dir("chunkerr");
    std::string text;
    for (int i = 1; i <= 16; ++i) {
      text += R"({"id":"r)" + std::to_string(i) +
              R"(","audio_ref":"a","total_duration_s":5,"segments":[{"start_s":0,"end_s":1,"text":"x"}]})" "\n";
    }
    text += "{\"id\": broken\n";
    spit(dir / "bad.jsonl", text);
    const auto r = cli({"chunk", (dir / "bad.jsonl").string(), "--out", (dir / "o.jsonl").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("line 17") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "o.jsonl"));
    const auto missing = cli({"chunk", (dir / "none.jsonl").string(), "--out", (dir / "o.jsonl").string()});
    CHECK(missing.code == 2);
  }

  TEST_CASE("filter command") {
    TempDir dir("filter");
    const auto syn = synth_corpus(dir);
    const auto full = cli({"filter", syn, "--method", "full_data", "--out", (dir / "full.jsonl").string()});
    REQUIRE(full.code == 0);
    CHECK(json_of(dir / "full.jsonl.stats.json")["stats"]["retention_rate"] == 1.0);
    CHECK(slurp(dir / "full.jsonl") == slurp(syn));

    const auto comp =
        cli({"filter", syn, "--method", "composite", "--alpha", "0.4", "--out", (dir / "comp.jsonl").string()});
    REQUIRE(comp.code == 0);
    const double ret = json_of(dir / "comp.jsonl.stats.json")["stats"]["retention_rate"];
    CHECK(ret > 0.0);
    CHECK(ret < 1.0);
    std::ifstream dec(dir / "comp.jsonl.decisions.jsonl");
    std::size_t lines = 0;
    for (std::string l; std::getline(dec, l);) ++lines;
    CHECK(lines == 60);

    const auto unknown = cli({"filter", syn, "--method", "best", "--out", (dir / "x.jsonl").string()});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("Usage") != std::string::npos);
  }

  TEST_CASE("filter fails before output when validator text is missing") {
    TempDir dir("novalidator");
    std::vector<Chunk> chunks = {make_chunk("a", "hello", "hello"), make_chunk("b", "world")};
    save_manifest(chunks, dir / "c.jsonl");
    const auto r = cli({"filter", (dir / "c.jsonl").string(), "--method", "direct_mer", "--out",
                        (dir / "k.jsonl").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("\"b\"") != std::string::npos);
    CHECK_FALSE(std::filesystem::exists(dir / "k.jsonl"));
    CHECK_FALSE(std::filesystem::exists(dir / "k.jsonl.decisions.jsonl"));
  }

  TEST_CASE("eval command") {
    TempDir dir("eval");
    std::vector<Chunk> chunks = {make_chunk("a", "t", {}, "你 好 world"), make_chunk("b", "t", {}, "我 用 python")};
    save_manifest(chunks, dir / "c.jsonl");
    spit(dir / "same.jsonl", "{\"id\":\"a\",\"text\":\"你 好 world\"}\n{\"id\":\"b\",\"text\":\"我 用 python\"}\n");
    spit(dir / "worse.jsonl", "{\"id\":\"a\",\"text\":\"你 world\"}\n{\"id\":\"b\",\"text\":\"我 要 python\"}\n");
    spit(dir / "partial.jsonl", "{\"id\":\"a\",\"text\":\"你\"}\n");
    spit(dir / "timings.jsonl",
         "{\"system_label\":\"teacher\",\"audio_s\":10,\"processing_s\":5}\n"
         "{\"system_label\":\"student\",\"audio_s\":10,\"processing_s\":1}\n");
    const auto c = (dir / "c.jsonl").string();

    REQUIRE(cli({"eval", c, "--hyp", (dir / "same.jsonl").string(), "--out", (dir / "same.json").string()}).code == 0);
    const auto same = json_of(dir / "same.json");
    CHECK(same["corpus"]["mer"] == 0.0);
    CHECK(same["corpus"]["del_percent"] == 0.0);

    REQUIRE(cli({"eval", c, "--hyp", (dir / "worse.jsonl").string(), "--out", (dir / "worse.json").string(),
                 "--timings", (dir / "timings.jsonl").string()})
                .code == 0);
    const auto worse = json_of(dir / "worse.json");
    CHECK(worse["corpus"]["mer"] == doctest::Approx(2.0 / 6.0));
    CHECK(worse["timings"]["systems"][1]["speedup"] == doctest::Approx(5.0));
    CHECK(std::filesystem::exists(dir / "worse.json.txt"));

    const auto merr = cli({"eval", c, "--hyp", (dir / "same.jsonl").string(), "--baseline-report",
                           (dir / "worse.json").string(), "--out", (dir / "merr.json").string()});
    REQUIRE(merr.code == 0);
    CHECK(json_of(dir / "merr.json")["merr"]["merr_percent"] == doctest::Approx(-100.0));

    const auto mismatch = cli({"eval", c, "--hyp", (dir / "partial.jsonl").string()});
    CHECK(mismatch.code == 1);
    CHECK(mismatch.err.find("b") != std::string::npos);
  }

  TEST_CASE("analyze command") {
    TempDir dir("analyze");
    const auto syn = synth_corpus(dir);
    const auto r = cli({"analyze", syn, "--out", (dir / "an.json").string()});
    REQUIRE(r.code == 0);
    const auto j = json_of(dir / "an.json");
    CHECK(j["reports"].size() == 3);
    CHECK(j["alphas"].size() == 9);
    CHECK(j["alphas"][0] == 0.1);
    CHECK(r.out.find("Max Recall") != std::string::npos);
    REQUIRE(cli({"analyze", syn, "--out", (dir / "an2.json").string(), "--workers", "3"}).code == 0);
    CHECK(slurp(dir / "an.json") == slurp(dir / "an2.json"));
    const auto one = cli({"analyze", syn, "--method", "direct_mer", "--out", (dir / "one.json").string()});
    REQUIRE(one.code == 0);
    CHECK(json_of(dir / "one.json")["reports"].size() == 1);

    std::vector<Chunk> no_ref = {make_chunk("a", "x", "x")};
    save_manifest(no_ref, dir / "noref.jsonl");
    CHECK(cli({"analyze", (dir / "noref.jsonl").string()}).code == 1);
  }

  TEST_CASE("kdcheck command") {
    TempDir dir("kd");
    spit(dir / "fx.jsonl",
         "{\"id\":\"half\",\"k\":1,\"v\":3,\"teacher\":[[0.5,0.25,0.25]],\"student\":[[0.5,0.25,0.25]],\"targets\":[0]}\n");
    const auto r = cli({"kdcheck", (dir / "fx.jsonl").string(), "--out", (dir / "kd.json").string()});
    REQUIRE(r.code == 0);
    const auto j = json_of(dir / "kd.json");
    CHECK(j["items"][0]["kl"] == 0.0);
    CHECK(j["items"][0]["total"].get<double>() == doctest::Approx(0.8 * std::log(2.0)));
    spit(dir / "bad.jsonl", "\n{\"k\":1,\"v\":2,\"teacher\":[[0.9,0.9]],\"student\":[[0.5,0.5]],\"targets\":[0]}\n");
    const auto bad = cli({"kdcheck", (dir / "bad.jsonl").string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("line 2") != std::string::npos);
  }

  TEST_CASE("synth command") {
    TempDir dir("synth");
    const auto a = (dir / "a.jsonl").string();
    const auto b = (dir / "b.jsonl").string();
    REQUIRE(cli({"synth", "--out", a, "--seed", "9", "--chunks", "50"}).code == 0);
    REQUIRE(cli({"synth", "--out", b, "--seed", "9", "--chunks", "50"}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a + ".truth.jsonl") == slurp(b + ".truth.jsonl"));
    CHECK(cli({"synth", "--out", a, "--hallucination-rate", "0.9", "--noisy-rate", "0.5"}).code == 1);
  }

  TEST_CASE("config file and environment fallback") {
    TempDir dir("config");
    const auto syn = synth_corpus(dir, 30);
    spit(dir / "cfg.conf", "filter.method = trivial\n");
    ::setenv("CSFILTER_CONFIG", (dir / "cfg.conf").c_str(), 1);
    const auto r = cli({"filter", syn, "--out", (dir / "k.jsonl").string()});
    ::unsetenv("CSFILTER_CONFIG");
    REQUIRE(r.code == 0);
    const auto j = json_of(dir / "k.jsonl.stats.json");
    CHECK(j["method"] == "trivial");
    CHECK(j["inputs"][1]["role"] == "config");
    const auto flag = cli({"filter", syn, "--config", (dir / "cfg.conf").string(), "--method", "composite", "--out",
                           (dir / "k2.jsonl").string()});
    REQUIRE(flag.code == 0);
    CHECK(json_of(dir / "k2.jsonl.stats.json")["method"] == "composite");
    spit(dir / "bad.conf", "filter.alpha = 2\n");
    CHECK(cli({"filter", syn, "--config", (dir / "bad.conf").string(), "--out", (dir / "k3.jsonl").string()}).code == 1);
    CHECK(cli({"filter", syn, "--config", (dir / "none.conf").string(), "--out", (dir / "k3.jsonl").string()}).code ==
          2);
  }
}
