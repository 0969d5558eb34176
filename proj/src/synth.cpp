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

#include "csfilter/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "csfilter/error.hpp"
#include "csfilter/metrics.hpp"

namespace csfilter {

namespace {

constexpr int kMaxAttempts = 200;

struct Word {
  std::string surface;
  bool cjk = false;
};

using Words = std::vector<Word>;

// Distribution helpers over the raw engine output so sequences are identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
  }

  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  bool chance(double p) { return unit() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

 private:
  std::mt19937_64 engine_;
};

class Vocabulary {
 public:
  explicit Vocabulary(const Lexicon& lex) {
    for (const auto& [word, _] : lex.english.entries) {
      if (word.find('\'') == std::string::npos) english_.push_back(word);
    }
    for (const auto& [ch, pron] : lex.mandarin.entries) {
      mandarin_.push_back(ch);
      by_pinyin_[pron.front()].push_back(ch);
      pinyin_[ch] = pron.front();
    }
    std::sort(english_.begin(), english_.end());
    std::sort(mandarin_.begin(), mandarin_.end());
    for (auto& [_, group] : by_pinyin_) std::sort(group.begin(), group.end());
    if (english_.size() < 8 || mandarin_.size() < 8) {
      throw ValidationError("synthetic corpus needs at least 8 English and 8 Mandarin lexicon entries");
    }
  }

  Word random_word(Rng& rng, bool cjk) const {
    return cjk ? Word{rng.pick(mandarin_), true} : Word{rng.pick(english_), false};
  }

  // A different token of the same language; Mandarin replacements avoid homophones.
  Word replacement(Rng& rng, const Word& w) const {
    for (int i = 0; i < kMaxAttempts; ++i) {
      Word r = random_word(rng, w.cjk);
      if (r.surface == w.surface) continue;
      if (w.cjk && pinyin_.at(r.surface) == pinyin_.at(w.surface)) continue;
      return r;
    }
    return random_word(rng, w.cjk);
  }

  // Same pronunciation, different character, when the lexicon has one.
  std::optional<Word> homophone(Rng& rng, const Word& w) const {
    if (!w.cjk) return std::nullopt;
    const auto& group = by_pinyin_.at(pinyin_.at(w.surface));
    if (group.size() < 2) return std::nullopt;
    for (int i = 0; i < kMaxAttempts; ++i) {
      const auto& c = rng.pick(group);
      if (c != w.surface) return Word{c, true};
    }
    return std::nullopt;
  }

 private:
  std::vector<std::string> english_;
  std::vector<std::string> mandarin_;
  std::map<std::string, std::vector<std::string>> by_pinyin_;
  std::map<std::string, std::string> pinyin_;
};

Words make_reference(Rng& rng, const Vocabulary& vocab, std::size_t len) {
  Words out;
  while (out.size() < len) {
    if (rng.chance(0.7)) {
      out.push_back(vocab.random_word(rng, true));
    } else {
      const std::size_t run = rng.between(1, 2);
      for (std::size_t i = 0; i < run && out.size() < len; ++i) out.push_back(vocab.random_word(rng, false));
    }
  }
  return out;
}

std::string render(const Words& words, Rng& rng) {
  static const char* const kPunct[] = {"，", "。", ",", ".", "？", "!"};
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0 && !(words[i].cjk && words[i - 1].cjk)) out.push_back(' ');
    out += words[i].surface;
    if (i + 1 < words.size() && rng.chance(0.06)) out += kPunct[rng.below(std::size(kPunct))];
  }
  return out;
}

Words light_noise(Rng& rng, const Vocabulary& vocab, const Words& ref, double homophone_p, double sub_p,
                  double del_p) {
  Words out;
  for (const auto& w : ref) {
    const double r = rng.unit();
    if (r < homophone_p) {
      auto h = vocab.homophone(rng, w);
      out.push_back(h ? *h : w);
    } else if (r < homophone_p + sub_p) {
      out.push_back(vocab.replacement(rng, w));
    } else if (r < homophone_p + sub_p + del_p) {
      continue;
    } else {
      out.push_back(w);
    }
  }
  return out;
}

Words heavy_noise(Rng& rng, const Vocabulary& vocab, const Words& ref) {
  const double f = rng.uniform(0.55, 0.85);
  Words out;
  for (const auto& w : ref) {
    if (!rng.chance(f)) {
      out.push_back(w);
      continue;
    }
    const double r = rng.unit();
    if (r < 0.7) {
      out.push_back(vocab.replacement(rng, w));
    } else if (r < 0.85) {
      continue;
    } else {
      out.push_back(w);
      out.push_back(vocab.random_word(rng, rng.chance(0.7)));
    }
  }
  return out;
}

// Keeps a prefix of `ref`, then loops a short phrase until the text is longer than the reference.
Words looped(Rng& rng, const Vocabulary& vocab, const Words& ref, const NgramConfig& ngram, int attempt) {
  const std::size_t cut = static_cast<std::size_t>(static_cast<double>(ref.size()) * rng.uniform(0.3, 0.6));
  const std::size_t phrase_len = rng.between(2, 5);
  Words phrase;
  for (std::size_t i = 0; i < phrase_len; ++i) {
    phrase.push_back(cut + i < ref.size() ? ref[cut + i] : vocab.random_word(rng, true));
  }
  const double tail = static_cast<double>(ref.size() - cut) * rng.uniform(1.0, 1.5);
  std::size_t reps = static_cast<std::size_t>(std::ceil(tail / static_cast<double>(phrase_len)));
  reps = std::max<std::size_t>(reps, std::max<std::size_t>(4, ngram.c + 2)) + static_cast<std::size_t>(attempt);
  reps = std::max<std::size_t>(reps, (ngram.n + phrase_len - 1) / phrase_len + ngram.c + 1);
  Words out(ref.begin(), ref.begin() + static_cast<std::ptrdiff_t>(cut));
  for (std::size_t r = 0; r < reps; ++r) out.insert(out.end(), phrase.begin(), phrase.end());
  return out;
}

std::vector<std::string> surfaces(const Words& w) {
  std::vector<std::string> out;
  out.reserve(w.size());
  for (const auto& x : w) out.push_back(x.surface);
  return out;
}

bool flagged(const Words& w, const NgramConfig& ngram) {
  const auto s = surfaces(w);
  return detect(std::span<const std::string>(s), ngram);
}

double word_mer(const Words& ref, const Words& hyp) {
  const auto a = align(surfaces(ref), surfaces(hyp));
  return ErrorRate::from_counts(a.distance(), a.ref_len, RateKind::mer).rate;
}

std::size_t rounded_count(double rate, std::size_t n) {
  return static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
}

}  // namespace

void SynthConfig::validate() const {
  auto rate_ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (chunks == 0) throw ValidationError("synth.chunks must be positive");
  if (!rate_ok(hallucination_rate) || !rate_ok(noisy_rate) || !rate_ok(validator_hallucination_rate) ||
      !rate_ok(repeat_share)) {
    throw ValidationError("synth rates must lie in [0, 1]");
  }
  if (rounded_count(hallucination_rate, chunks) + rounded_count(noisy_rate, chunks) +
          rounded_count(validator_hallucination_rate, chunks) >
      chunks) {
    throw ValidationError("synth category rates add up to more than the corpus");
  }
  if (min_tokens < 8 || max_tokens < min_tokens) throw ValidationError("synth token bounds need 8 <= min <= max");
}

const char* to_string(SynthCategory c) {
  switch (c) {
    case SynthCategory::clean:
      return "clean";
    case SynthCategory::teacher_loop:
      return "teacher_loop";
    case SynthCategory::teacher_repeat:
      return "teacher_repeat";
    case SynthCategory::noisy:
      return "noisy";
    case SynthCategory::validator_loop:
      return "validator_loop";
  }
  return "clean";
}

SynthCorpus synthesize(const SynthConfig& cfg, std::uint64_t seed, const Lexicon& lex, const NgramConfig& ngram,
                       const TextConfig& text) {
  cfg.validate();
  ngram.validate();
  const Vocabulary vocab(lex);
  Rng rng(seed);

  const std::size_t n = cfg.chunks;
  const std::size_t halluc = rounded_count(cfg.hallucination_rate, n);
  const std::size_t repeat = rounded_count(cfg.repeat_share, halluc);
  const std::size_t noisy = rounded_count(cfg.noisy_rate, n);
  const std::size_t vloop = rounded_count(cfg.validator_hallucination_rate, n);

  std::vector<SynthCategory> categories(n, SynthCategory::clean);
  std::size_t k = 0;
  for (std::size_t i = 0; i < halluc - repeat; ++i) categories[k++] = SynthCategory::teacher_loop;
  for (std::size_t i = 0; i < repeat; ++i) categories[k++] = SynthCategory::teacher_repeat;
  for (std::size_t i = 0; i < noisy; ++i) categories[k++] = SynthCategory::noisy;
  for (std::size_t i = 0; i < vloop; ++i) categories[k++] = SynthCategory::validator_loop;
  for (std::size_t i = n; i > 1; --i) std::swap(categories[i - 1], categories[rng.below(i)]);

  SynthCorpus corpus;
  corpus.chunks.reserve(n);
  corpus.truth.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SynthCategory cat = categories[i];
    Words ref;
    Words teacher;
    Words validator;
    bool ok = false;
    for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
      ref = make_reference(rng, vocab, rng.between(cfg.min_tokens, cfg.max_tokens));
      if (flagged(ref, ngram)) continue;
      validator = light_noise(rng, vocab, ref, 0.06, 0.04, 0.02);
      switch (cat) {
        case SynthCategory::clean:
          teacher = light_noise(rng, vocab, ref, 0.0, 0.04, 0.0);
          ok = !flagged(teacher, ngram) && !flagged(validator, ngram) && word_mer(ref, teacher) <= 0.4;
          break;
        case SynthCategory::teacher_loop:
          teacher = looped(rng, vocab, ref, ngram, attempt);
          ok = flagged(teacher, ngram) && !flagged(validator, ngram);
          break;
        case SynthCategory::teacher_repeat:
          teacher = ref;
          teacher.insert(teacher.end(), ref.begin(), ref.end());
          ok = !flagged(teacher, ngram) && !flagged(validator, ngram);
          break;
        case SynthCategory::noisy:
          teacher = heavy_noise(rng, vocab, ref);
          ok = !flagged(teacher, ngram) && !flagged(validator, ngram) && word_mer(ref, teacher) > 0.4;
          break;
        case SynthCategory::validator_loop:
          teacher = light_noise(rng, vocab, ref, 0.0, 0.04, 0.0);
          validator = looped(rng, vocab, ref, ngram, attempt);
          ok = !flagged(teacher, ngram) && flagged(validator, ngram) && word_mer(ref, teacher) <= 0.4;
          break;
      }
    }
    if (!ok) {
      throw ValidationError(std::string("could not synthesize a ") + to_string(cat) +
                            " item under the configured n-gram settings");
    }

    const std::int64_t dur_ms =
        std::min<std::int64_t>(30000, static_cast<std::int64_t>(300 * ref.size() + rng.below(2001)));
    Chunk c;
    const std::string rec = "syn" + std::to_string(100000 + i / 10).substr(1);
    c.id = rec + "#" + std::to_string(i % 10);
    c.recording_id = rec;
    c.start_s = 0.0;
    c.end_s = static_cast<double>(dur_ms) / 1000.0;
    c.duration_s = c.end_s;
    c.teacher_text = text.timestamps.format(0.0) + render(teacher, rng) + text.timestamps.format(c.end_s);
    c.validator_text = render(validator, rng);
    c.reference_text = render(ref, rng);

    SynthTruth t;
    t.id = c.id;
    t.category = cat;
    t.teacher_hallucinated = cat == SynthCategory::teacher_loop || cat == SynthCategory::teacher_repeat;
    t.validator_hallucinated = cat == SynthCategory::validator_loop;
    t.noisy = cat == SynthCategory::noisy;
    t.teacher_mer = mer(*c.reference_text, c.teacher_text, text).rate.rate;
    if (t.noisy && !(t.teacher_mer > 0.4)) {
      throw Error("synthesized noisy item " + c.id + " has MER " + std::to_string(t.teacher_mer));
    }

    corpus.chunks.push_back(std::move(c));
    corpus.truth.push_back(std::move(t));
  }
  return corpus;
}

nlohmann::ordered_json to_json(const SynthTruth& t) {
  return {{"id", t.id},
          {"category", to_string(t.category)},
          {"teacher_hallucinated", t.teacher_hallucinated},
          {"validator_hallucinated", t.validator_hallucinated},
          {"noisy", t.noisy},
          {"teacher_mer", t.teacher_mer}};
}

}  // namespace csfilter
