// transducer.h
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
// Weighted transducer compiled from a joint n-gram model, and its N-best
// decoder. Costs are negative natural logs in the tropical (min, +) sense.

#ifndef T2T_TRANSDUCER_H_
#define T2T_TRANSDUCER_H_

#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "t2t/corpus.h"
#include "t2t/error.h"
#include "t2t/ngram.h"

namespace t2t {

using StateId = int32_t;
using Label = int32_t;

inline constexpr Label kEpsLabel = 0;
// On input, matches any token without an input label; on output, copies it.
inline constexpr Label kCopyLabel = 1;
inline constexpr double kInfCost = std::numeric_limits<double>::infinity();

// Word <-> label id; 0 is "<eps>", 1 is "<unk>" (the copy class).
class LabelTable {
 public:
  LabelTable();
  Label Intern(const std::string &word);
  // -1 when absent.
  Label Find(const std::string &word) const;
  const std::string &Word(Label label) const { return words_[label]; }
  size_t size() const { return words_.size(); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, Label> index_;
};

struct Arc {
  Label ilabel = kEpsLabel;
  Label olabel = kEpsLabel;
  double cost = 0.0;
  StateId next = 0;
};

class MappingTransducer {
 public:
  StateId AddState();
  void AddArc(StateId state, const Arc &arc);
  void SetStart(StateId state) { start_ = state; }
  void SetFinal(StateId state, double cost) { finals_[state] = cost; }

  StateId start() const { return start_; }
  size_t num_states() const { return arcs_.size(); }
  size_t num_arcs() const;
  const std::vector<Arc> &Arcs(StateId state) const { return arcs_[state]; }
  double Final(StateId state) const { return finals_[state]; }

  LabelTable &input_labels() { return isyms_; }
  LabelTable &output_labels() { return osyms_; }
  const LabelTable &input_labels() const { return isyms_; }
  const LabelTable &output_labels() const { return osyms_; }

  int model_order() const { return model_order_; }
  void set_model_order(int order) { model_order_ = order; }

  // Drops states not on a start-to-final path; keeps the relative order of
  // the survivors.
  void Trim();

  // Stable sort of every state's arcs by input label. The decoder looks up
  // matching arcs by binary search when the arcs are sorted.
  void ArcSortInput();
  bool input_sorted() const { return input_sorted_; }

 private:
  std::vector<std::vector<Arc>> arcs_;
  std::vector<double> finals_;
  StateId start_ = -1;
  LabelTable isyms_;
  LabelTable osyms_;
  int model_order_ = 0;
  bool input_sorted_ = true;
};

struct DecodeConfig {
  int nbest = 500;
  double beam = kInfCost;  // cost width kept above the best complete path
  bool passthrough = true;
  double passthrough_penalty = 8.0;  // nats per copied token
  int output_top_k = 1;

  // Throws InvalidArgument.
  void Validate() const;
};

// One state per n-gram context with a backoff weight plus the empty context.
// A pair symbol with k source and m target words becomes a chain of
// max(k, m, 1) arcs padded with epsilons, the whole cost on the first arc.
// With passthrough on, every context state gets a copy arc into the
// empty-context state, and the empty-context state gets an identity self-loop
// for every input word; both cost passthrough_penalty.
// Throws TransducerError for a model with a positive log-probability.
MappingTransducer BuildTransducer(const JointNGramModel &model,
                                  const DecodeConfig &config);

struct ArcRef {
  StateId state = 0;
  int32_t index = 0;
};

struct Candidate {
  Tokens tokens;
  double cost = 0.0;
  std::vector<ArcRef> path;  // arcs taken, in order
};

struct DecodeResult {
  std::string id;
  std::vector<Candidate> candidates;  // ascending (cost, length, tokens)
  bool failed = false;  // no path; the single candidate is the input
};

class NoPathError : public TransducerError {
 public:
  NoPathError(const std::string &what, size_t longest_prefix)
      : TransducerError(what), longest_prefix_(longest_prefix) {}
  // Input tokens consumed by the deepest partial path.
  size_t longest_prefix() const { return longest_prefix_; }

 private:
  size_t longest_prefix_;
};

// Best-first search of the input acceptor composed with the transducer,
// recombining hypotheses on (state, consumed input, output so far). Returns
// the cfg.nbest cheapest distinct outputs truncated to cfg.output_top_k.
// Throws NoPathError.
DecodeResult NBestDecode(const MappingTransducer &fst, const Tokens &input,
                         const DecodeConfig &config);

// Utterances without a path come back unchanged with infinite cost and
// failed = true; *failures counts them. Output order follows input order.
std::vector<DecodeResult> ApplyCorpus(const MappingTransducer &fst,
                                      const std::vector<Utterance> &utterances,
                                      const DecodeConfig &config,
                                      int num_threads = 1,
                                      size_t *failures = nullptr);

// Decode output TSV: "id<TAB>rank<TAB>cost<TAB>tokens".
std::string FormatDecodeResults(const std::vector<DecodeResult> &results);

// Text container starting with the "T2TFST1" magic. Throws TransducerError.
std::string FormatTransducer(const MappingTransducer &fst);
MappingTransducer ParseTransducer(const std::vector<std::string> &lines,
                                  const std::string &source);
MappingTransducer LoadTransducer(const std::string &path);
void WriteTransducer(const std::string &path, const MappingTransducer &fst);

}  // namespace t2t

#endif  // T2T_TRANSDUCER_H_
