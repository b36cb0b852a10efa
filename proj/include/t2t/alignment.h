// alignment.h
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
// Monotone many-to-many word alignment between hypothesis and reference.
//
// Each pair defines a lattice whose node (i, j) stands for having consumed i
// hypothesis words and j reference words. An edge (i, j) -> (i+a, j+b)
// carries the PairSymbol hyp[i..i+a) : ref[j..j+b). EM over these lattices
// learns a unigram distribution over PairSymbols; Viterbi then segments each
// pair into the joint-token sequence the n-gram model is trained on.

#ifndef T2T_ALIGNMENT_H_
#define T2T_ALIGNMENT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "t2t/corpus.h"
#include "t2t/pair_symbol.h"

namespace t2t {

struct AlignmentConfig {
  int max_x = 3;  // longest hypothesis run in one symbol
  int max_y = 3;  // longest reference run in one symbol
  bool allow_source_deletion = true;   // symbols like "uh}<eps>"
  bool allow_target_insertion = true;  // symbols like "<eps>}la"
  int max_iterations = 20;
  double convergence_epsilon = 1e-6;  // relative log-likelihood change
  int num_threads = 1;

  // Throws InvalidArgument.
  void Validate() const;
};

// Probability assigned to symbols the model has never seen when decoding.
inline constexpr double kUnseenSymbolProbability = 1e-12;

struct LatticeEdge {
  int32_t from = 0;
  int32_t to = 0;
  uint8_t source_len = 0;
  uint8_t target_len = 0;
};

// Trimmed alignment lattice: only edges on some start-to-final path remain.
// Node ids are i * (ref_len + 1) + j, so every edge goes to a larger id and
// edges are stored sorted by (from, source_len, target_len).
struct AlignmentLattice {
  int hyp_len = 0;
  int ref_len = 0;
  std::vector<LatticeEdge> edges;

  int32_t NodeId(int i, int j) const { return i * (ref_len + 1) + j; }
  int num_nodes() const { return (hyp_len + 1) * (ref_len + 1); }
  int32_t final_node() const { return NodeId(hyp_len, ref_len); }
  int HypPos(int32_t node) const { return node / (ref_len + 1); }
  int RefPos(int32_t node) const { return node % (ref_len + 1); }
  PairSymbol SymbolOf(const LatticeEdge &edge, const UtterancePair &pair) const;
};

// Throws AlignmentError when no start-to-final path exists or the hypothesis
// is longer than 10 * max_x * |reference|.
AlignmentLattice BuildLattice(const UtterancePair &pair,
                              const AlignmentConfig &config);

// Forward and backward log scores of a lattice given per-edge log scores.
struct ForwardBackward {
  std::vector<double> alpha;
  std::vector<double> beta;
  double log_total = 0.0;  // alpha[final] == beta[start]
};

ForwardBackward RunForwardBackward(const AlignmentLattice &lattice,
                                   const std::vector<double> &edge_logprob);

// Posterior probability of every edge, exp(alpha + w + beta - total).
std::vector<double> EdgePosteriors(const AlignmentLattice &lattice,
                                   const std::vector<double> &edge_logprob,
                                   const ForwardBackward &fb);

class AlignmentModel {
 public:
  AlignmentModel() = default;

  // Keeps only symbols with positive probability; throws InvalidArgument if
  // the remaining probabilities do not sum to 1 within 1e-9.
  static AlignmentModel FromProbabilities(
      std::vector<std::pair<PairSymbol, double>> probabilities);

  // 0 for unseen symbols.
  double Probability(const PairSymbol &symbol) const;
  // log(probability), or log(kUnseenSymbolProbability) for unseen symbols.
  double ScoreForDecoding(const PairSymbol &symbol) const;

  size_t size() const { return table_.size(); }
  bool empty() const { return table_.size() == 0; }
  const PairSymbol &Symbol(size_t i) const { return table_.Symbol(i); }
  double ProbabilityAt(size_t i) const { return probs_[i]; }

 private:
  PairSymbolTable table_;
  std::vector<double> probs_;
};

// Text form: "symbol<TAB>probability" lines in symbol order.
std::string FormatAlignmentModel(const AlignmentModel &model);
AlignmentModel ParseAlignmentModel(const std::vector<std::string> &lines,
                                   const std::string &source);

struct EmTrace {
  // Corpus log-likelihood (sum over pairs of weight * log P(pair)) under the
  // model entering each iteration.
  std::vector<double> log_likelihoods;
  size_t unalignable_pairs = 0;
  size_t unique_pairs = 0;
  size_t num_symbols = 0;
  bool converged = false;
};

// Throws AlignmentError when nothing is alignable or the likelihood turns NaN.
AlignmentModel TrainAlignmentModel(const std::vector<UtterancePair> &corpus,
                                   const AlignmentConfig &config,
                                   EmTrace *trace = nullptr);

struct AlignedUtterance {
  std::string id;
  std::vector<PairSymbol> symbols;
  double weight = 1.0;

  bool operator==(const AlignedUtterance &) const = default;
};

// Best path under the model; ties go to fewer symbols, then to the
// lexicographically smaller symbol sequence. Throws AlignmentError.
AlignedUtterance ViterbiAlign(const UtterancePair &pair,
                              const AlignmentModel &model,
                              const AlignmentConfig &config);

// Unalignable pairs are dropped and counted in *skipped.
std::vector<AlignedUtterance> AlignCorpus(
    const std::vector<UtterancePair> &corpus, const AlignmentModel &model,
    const AlignmentConfig &config, size_t *skipped = nullptr);

// Aligned corpus file: "id<TAB>weight<TAB>sym1 sym2 ..." per line.
std::string FormatAlignedCorpus(const std::vector<AlignedUtterance> &corpus);
std::vector<AlignedUtterance> ParseAlignedCorpus(
    const std::vector<std::string> &lines, const std::string &source);
std::vector<AlignedUtterance> LoadAlignedCorpus(const std::string &path);
void WriteAlignedCorpus(const std::string &path,
                        const std::vector<AlignedUtterance> &corpus);

}  // namespace t2t

#endif  // T2T_ALIGNMENT_H_
