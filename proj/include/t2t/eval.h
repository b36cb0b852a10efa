// eval.h
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
// Word error rate scoring and normalized WER.

#ifndef T2T_EVAL_H_
#define T2T_EVAL_H_

#include <optional>
#include <string>
#include <vector>

#include "t2t/corpus.h"

namespace t2t {

struct EditOps {
  long matches = 0;
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;

  long errors() const { return substitutions + deletions + insertions; }
  EditOps &operator+=(const EditOps &o);
  bool operator==(const EditOps &) const = default;
};

// Unit-cost Levenshtein alignment. Among minimal-error alignments the one
// with the most matches wins, then the one with the fewest substitutions.
EditOps AlignEditDistance(const Tokens &hyp, const Tokens &ref);

struct UtteranceScore {
  std::string id;
  EditOps ops;
  long reference_words = 0;
};

struct WerReport {
  EditOps ops;
  long reference_words = 0;
  double wer = 0.0;
  std::optional<double> nwer;
  std::vector<UtteranceScore> utterances;
};

struct ScoredPair {
  std::string id;
  Tokens hypothesis;
  Tokens reference;
};

// Error sum over reference-word sum. Throws EvalError when the corpus has no
// reference words.
WerReport CorpusWer(const std::vector<ScoredPair> &pairs,
                    std::optional<double> reference_wer = std::nullopt);

// wer / reference_wer. Throws InvalidArgument unless reference_wer > 0.
double Nwer(double wer, double reference_wer);

// 100 * (baseline - system) / baseline. Throws InvalidArgument unless
// baseline > 0.
double RelativeReduction(double baseline, double system);

// Per-utterance rows plus a TOTAL row.
std::string FormatReportTsv(const WerReport &report);
// {"sub":..,"del":..,"ins":..,"ref_words":..,"wer":..,"nwer":..}
std::string FormatReportJson(const WerReport &report);
// Reads the "wer" and "nwer" fields back from FormatReportJson output.
struct ReportSummary {
  double wer = 0.0;
  std::optional<double> nwer;
};
ReportSummary ParseReportJson(const std::string &text);

}  // namespace t2t

#endif  // T2T_EVAL_H_
