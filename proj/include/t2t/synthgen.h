// synthgen.h
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
//
// \file
// Noisy-channel corpus synthesis. Clean target-language transcripts are
// corrupted by rewrite rules and random word deletion to produce the paired
// and N-best hypothesis corpora a recognizer would have produced.

#ifndef T2T_SYNTHGEN_H_
#define T2T_SYNTHGEN_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "t2t/corpus.h"

namespace t2t {

struct CorruptionRule {
  Tokens match;        // 1..3 target-language words
  Tokens replacement;  // 0..3 words; empty deletes the span
  double probability = 1.0;
};

struct CorruptionModel {
  std::vector<CorruptionRule> rules;
  double word_deletion_prob = 0.05;
  uint64_t seed = 42;

  // Throws InvalidArgument.
  void Validate() const;
};

struct SynthConfig {
  int nbest_size = 25;
  // Alternatives (ranks 2..n) flatten rule probabilities toward 0.5 and scale
  // the deletion probability by (1 + temperature).
  double alternative_temperature = 1.0;

  void Validate() const;
};

// Deterministic uniform doubles from mt19937_64, independent of the standard
// library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : engine_(seed) {}
  // Stream for one utterance of a run.
  static RandomStream ForUtterance(uint64_t seed, uint64_t index);
  double Uniform();  // [0, 1)
  uint64_t Below(uint64_t n);  // [0, n)

 private:
  std::mt19937_64 engine_;
};

// Rule probabilities and deletion probability actually used by one draw.
struct DrawParams {
  double temperature = 0.0;  // 0 for the rank-1 draw
};

// Leftmost-longest scan; at each position candidate rules are tried longest
// first, then in file order, each firing with its probability. Unmatched
// tokens are deleted with word_deletion_prob, otherwise copied.
Tokens CorruptUtterance(const Tokens &reference, const CorruptionModel &model,
                        RandomStream &stream, const DrawParams &params = {});

struct SynthOutput {
  std::vector<UtterancePair> paired;  // rank-1 hypothesis vs reference
  std::vector<NBestList> nbest;
};

// Throws InvalidArgument on empty input.
SynthOutput GenerateCorpus(const std::vector<Utterance> &references,
                           const CorruptionModel &model,
                           const SynthConfig &config);

// Rule file: "match<TAB>replacement<TAB>probability", "<eps>" for an empty
// replacement. Blank lines and lines starting with '#' are ignored. Throws
// ParseError with line numbers.
std::vector<CorruptionRule> ParseRules(const std::vector<std::string> &lines,
                                       const std::string &source);
std::vector<CorruptionRule> LoadRules(const std::string &path);

// Phrase file: one phrase per line, '#' comments. Throws ParseError.
std::vector<Tokens> LoadPhrases(const std::string &path);

// Utterances of one to three phrases drawn uniformly with the given seed,
// ids "<prefix><index>".
std::vector<Utterance> ComposeReferenceCorpus(const std::vector<Tokens> &phrases,
                                              size_t count, uint64_t seed,
                                              const std::string &id_prefix);

}  // namespace t2t

#endif  // T2T_SYNTHGEN_H_
