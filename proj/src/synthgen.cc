// synthgen.cc
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
//
// Copyright 2026 The t2tmap Authors.

#include "t2t/synthgen.h"

#include <algorithm>
#include <cmath>

#include "t2t/error.h"
#include "t2t/text_util.h"

namespace t2t {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

bool IsSkippable(const std::string &line) {
  auto fields = SplitWhitespace(line);
  return fields.empty() || fields[0][0] == '#';
}

}  // namespace

void CorruptionModel::Validate() const {
  if (!(word_deletion_prob >= 0 && word_deletion_prob < 1)) {
    throw InvalidArgument("word_deletion_prob must be in [0, 1)");
  }
  for (const auto &r : rules) {
    if (r.match.empty() || r.match.size() > 3) {
      throw InvalidArgument("rule match must have 1..3 tokens");
    }
    if (r.replacement.size() > 3) {
      throw InvalidArgument("rule replacement must have 0..3 tokens");
    }
    if (!(r.probability > 0 && r.probability <= 1)) {
      throw InvalidArgument("rule probability must be in (0, 1]");
    }
  }
}

void SynthConfig::Validate() const {
  if (nbest_size < 1) throw InvalidArgument("nbest_size must be positive");
  if (!(alternative_temperature > 0)) {
    throw InvalidArgument("alternative_temperature must be positive");
  }
}

RandomStream RandomStream::ForUtterance(uint64_t seed, uint64_t index) {
  return RandomStream(SplitMix64(seed ^ SplitMix64(index)));
}

double RandomStream::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

uint64_t RandomStream::Below(uint64_t n) {
  // Rejection sampling keeps the result exactly uniform.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

Tokens CorruptUtterance(const Tokens &reference, const CorruptionModel &model,
                        RandomStream &stream, const DrawParams &params) {
  const double t = params.temperature;
  const double deletion =
      std::min(0.5, model.word_deletion_prob * (1.0 + t));
  auto fire_prob = [t](double p) { return (p + 0.5 * t) / (1.0 + t); };

  // Candidate rule indices ordered by match length (longest first), then
  // file order.
  std::vector<size_t> by_length(model.rules.size());
  for (size_t i = 0; i < by_length.size(); ++i) by_length[i] = i;
  std::stable_sort(by_length.begin(), by_length.end(),
                   [&model](size_t a, size_t b) {
                     return model.rules[a].match.size() >
                            model.rules[b].match.size();
                   });

  Tokens out;
  size_t i = 0;
  while (i < reference.size()) {
    bool fired = false;
    for (size_t r : by_length) {
      const CorruptionRule &rule = model.rules[r];
      const size_t len = rule.match.size();
      if (i + len > reference.size() ||
          !std::equal(rule.match.begin(), rule.match.end(),
                      reference.begin() + i)) {
        continue;
      }
      if (stream.Uniform() < fire_prob(rule.probability)) {
        out.insert(out.end(), rule.replacement.begin(), rule.replacement.end());
        i += len;
        fired = true;
        break;
      }
    }
    if (fired) continue;
    if (!(deletion > 0 && stream.Uniform() < deletion)) out.push_back(reference[i]);
    ++i;
  }
  return out;
}

SynthOutput GenerateCorpus(const std::vector<Utterance> &references,
                           const CorruptionModel &model,
                           const SynthConfig &config) {
  model.Validate();
  config.Validate();
  if (references.empty()) throw InvalidArgument("no reference utterances");
  SynthOutput output;
  for (size_t u = 0; u < references.size(); ++u) {
    const Utterance &ref = references[u];
    if (ref.tokens.empty()) {
      throw InvalidArgument("empty reference for '" + ref.id + "'");
    }
    RandomStream stream = RandomStream::ForUtterance(model.seed, u);
    std::vector<Tokens> variants;
    variants.push_back(CorruptUtterance(ref.tokens, model, stream));
    const DrawParams alt{config.alternative_temperature};
    const int max_draws = 4 * config.nbest_size;
    for (int draw = 1; draw < max_draws &&
                       static_cast<int>(variants.size()) < config.nbest_size;
         ++draw) {
      Tokens v = CorruptUtterance(ref.tokens, model, stream, alt);
      if (std::find(variants.begin(), variants.end(), v) == variants.end()) {
        variants.push_back(std::move(v));
      }
    }
    output.paired.push_back(UtterancePair{ref.id, variants[0], ref.tokens, 1.0});
    NBestList list{ref.id, {}};
    for (size_t k = 0; k < variants.size(); ++k) {
      const int rank = static_cast<int>(k + 1);
      list.entries.push_back(NBestEntry{rank, rank / 10.0, variants[k]});
    }
    output.nbest.push_back(std::move(list));
  }
  return output;
}

std::vector<CorruptionRule> ParseRules(const std::vector<std::string> &lines,
                                       const std::string &source) {
  std::vector<CorruptionRule> rules;
  for (size_t i = 0; i < lines.size(); ++i) {
    if (IsSkippable(lines[i])) continue;
    const size_t line_no = i + 1;
    auto fields = SplitFields(lines[i]);
    if (fields.size() != 3) {
      throw ParseError(source, line_no,
                       "expected 'match<TAB>replacement<TAB>probability'");
    }
    CorruptionRule rule;
    try {
      rule.match = NormalizeText(fields[0]);
      if (SplitWhitespace(fields[1]) != Tokens{std::string(kEpsilon)}) {
        rule.replacement = NormalizeText(fields[1]);
      }
    } catch (const ParseError &e) {
      throw ParseError(source, line_no, e.what());
    }
    if (!ParseDouble(fields[2], &rule.probability) ||
        !(rule.probability > 0 && rule.probability <= 1)) {
      throw ParseError(source, line_no,
                       "probability must be in (0, 1], got '" + fields[2] + "'");
    }
    if (rule.match.empty() || rule.match.size() > 3) {
      throw ParseError(source, line_no, "match must have 1..3 tokens");
    }
    if (rule.replacement.size() > 3) {
      throw ParseError(source, line_no, "replacement must have 0..3 tokens");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

std::vector<CorruptionRule> LoadRules(const std::string &path) {
  return ParseRules(ReadLines(path), path);
}

std::vector<Tokens> LoadPhrases(const std::string &path) {
  std::vector<Tokens> phrases;
  auto lines = ReadLines(path);
  for (size_t i = 0; i < lines.size(); ++i) {
    if (IsSkippable(lines[i])) continue;
    Tokens phrase;
    try {
      phrase = NormalizeText(lines[i]);
    } catch (const ParseError &e) {
      throw ParseError(path, i + 1, e.what());
    }
    if (!phrase.empty()) phrases.push_back(std::move(phrase));
  }
  if (phrases.empty()) throw ParseError(path + ": no phrases");
  return phrases;
}

std::vector<Utterance> ComposeReferenceCorpus(const std::vector<Tokens> &phrases,
                                              size_t count, uint64_t seed,
                                              const std::string &id_prefix) {
  if (phrases.empty()) throw InvalidArgument("no phrases");
  RandomStream stream(SplitMix64(seed));
  std::vector<Utterance> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    Utterance utt;
    utt.id = id_prefix + std::to_string(i);
    const uint64_t parts = 1 + stream.Below(3);
    for (uint64_t p = 0; p < parts; ++p) {
      const Tokens &phrase = phrases[stream.Below(phrases.size())];
      utt.tokens.insert(utt.tokens.end(), phrase.begin(), phrase.end());
    }
    out.push_back(std::move(utt));
  }
  return out;
}

}  // namespace t2t
