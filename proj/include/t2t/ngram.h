// ngram.h
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
// Joint n-gram model over PairSymbols with interpolated modified Kneser-Ney
// smoothing.
//
// Sentences are padded with order-1 "<s>" and one "</s>". Weighted
// (fractional) counts are used as-is; they are rounded to the nearest
// integer only to bucket them for count-of-counts and discount selection.
// Probabilities are stored as log10, as in ARPA files.

#ifndef T2T_NGRAM_H_
#define T2T_NGRAM_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "t2t/alignment.h"
#include "t2t/pair_symbol.h"

namespace t2t {

using SymbolId = int32_t;
using NGram = std::vector<SymbolId>;

inline constexpr SymbolId kBosId = 0;
inline constexpr SymbolId kEosId = 1;
inline constexpr SymbolId kOovId = -1;
inline constexpr int kMaxOrder = 9;

// Log-probability (natural log) charged for a symbol outside the vocabulary.
inline constexpr double kOovLogProb = -20.0;

// log10 value written for context-only entries ("<s>", "<s> <s>", ...).
inline constexpr double kNoProbLog10 = -99.0;

// Ids 0 and 1 are "<s>" and "</s>"; pair symbols follow in first-seen order.
class NGramVocabulary {
 public:
  NGramVocabulary();
  SymbolId Intern(const PairSymbol &symbol);
  // kOovId when absent.
  SymbolId Find(const PairSymbol &symbol) const;
  // Accepts "<s>", "</s>" or an escaped pair symbol.
  SymbolId InternText(const std::string &text);
  const PairSymbol &Symbol(SymbolId id) const;
  std::string Text(SymbolId id) const;
  // Includes the two sentinels.
  size_t size() const { return pairs_.size() + 2; }
  // Predictable symbols: every pair symbol plus "</s>".
  size_t num_predictable() const { return pairs_.size() + 1; }

 private:
  PairSymbolTable pairs_;
};

struct NGramCounts {
  int order = 0;
  NGramVocabulary vocab;
  // levels[k-1] holds the k-grams; the last element is the predicted symbol.
  std::vector<std::map<NGram, double>> levels;
};

// Throws InvalidArgument unless 1 <= order <= kMaxOrder.
NGramCounts CountNGrams(const std::vector<AlignedUtterance> &corpus, int order);

struct LevelDiscount {
  double d1 = 0.5;
  double d2 = 0.5;
  double d3plus = 0.5;
  bool fallback = false;  // count-of-counts were degenerate

  // Discount for a count, bucketed by its rounded value.
  double For(double count) const;
};

struct Discounts {
  std::vector<LevelDiscount> levels;  // index k-1 for k-grams
  int fallback_levels() const;
};

// Y = n1/(n1+2 n2); D1 = 1-2Y n2/n1; D2 = 2-3Y n3/n2; D3+ = 3-4Y n4/n3,
// clamped into [0, 0.99 r]. Any zero n_r gives the 0.5 fallback.
LevelDiscount DiscountsFromCountOfCounts(double n1, double n2, double n3,
                                         double n4);

// Kneser-Ney adjusted counts: raw counts at the top order and for n-grams
// starting with "<s>", left-continuation type counts elsewhere.
std::vector<std::map<NGram, double>> AdjustedCounts(const NGramCounts &counts);

// Count-of-counts are taken over the adjusted counts of each level.
Discounts EstimateDiscounts(const NGramCounts &counts);

class JointNGramModel {
 public:
  int order() const { return order_; }
  const NGramVocabulary &vocab() const { return vocab_; }

  // log10 p(ngram.back() | ngram[0..k-1]) for stored n-grams.
  const std::map<NGram, double> &Level(int k) const { return probs_[k - 1]; }
  // log10 backoff weight for contexts that have one.
  const std::map<NGram, double> &Backoffs() const { return backoffs_; }

  // Natural-log conditional probability with backoff. `context` may be longer
  // than order-1; only its tail is used. kOovId anywhere is allowed.
  double LogProb(const NGram &context, SymbolId symbol) const;

  // Sum over the predictable vocabulary of p(w | context). Diagnostic.
  double ContextMass(const NGram &context) const;

 private:
  friend JointNGramModel EstimateModifiedKneserNey(const NGramCounts &,
                                                   const Discounts &);
  friend JointNGramModel ParseJointNGramModel(const std::vector<std::string> &,
                                              const std::string &);

  int order_ = 0;
  NGramVocabulary vocab_;
  std::vector<std::map<NGram, double>> probs_;
  std::map<NGram, double> backoffs_;
};

// Throws EstimationError if a probability comes out above 1.
JointNGramModel EstimateModifiedKneserNey(const NGramCounts &counts,
                                          const Discounts &discounts);

// Natural log. Unknown symbols cost kOovLogProb each.
double SequenceLogProb(const JointNGramModel &model,
                       const std::vector<PairSymbol> &symbols);

// exp(-sum w*logprob / sum w*(|symbols|+1)). Throws InvalidArgument on an
// empty or zero-weight corpus.
double Perplexity(const JointNGramModel &model,
                  const std::vector<AlignedUtterance> &corpus);

// Model file, ARPA-like:
//   \t2tmap-jointlm order=N\  (header)
//   \1-grams:
//   logprob<TAB>sym<TAB>backoff
//   ...
//   \end\  (terminator)
// log10 values with 17 significant digits.
std::string FormatJointNGramModel(const JointNGramModel &model);
JointNGramModel ParseJointNGramModel(const std::vector<std::string> &lines,
                                     const std::string &source);
JointNGramModel LoadJointNGramModel(const std::string &path);
void WriteJointNGramModel(const std::string &path,
                          const JointNGramModel &model);

}  // namespace t2t

#endif  // T2T_NGRAM_H_
