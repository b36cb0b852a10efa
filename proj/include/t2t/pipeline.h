// pipeline.h
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
// File-to-file pipeline stages behind the t2t subcommands. Stages share no
// state except the files they read and write.

#ifndef T2T_PIPELINE_H_
#define T2T_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "t2t/alignment.h"
#include "t2t/corpus.h"
#include "t2t/eval.h"
#include "t2t/synthgen.h"
#include "t2t/transducer.h"

namespace t2t {

// Worker count: `requested` (0 = hardware concurrency) capped by the
// T2T_THREADS environment variable when set.
int ResolveThreads(int requested);

struct SynthStageOptions {
  std::string refs_path;     // transcript TSV of clean references, or
  std::string phrases_path;  // phrase list to compose `count` references from
  size_t count = 0;
  std::string id_prefix = "utt";
  std::string rules_path;
  uint64_t seed = 42;
  double word_deletion_prob = 0.05;
  SynthConfig synth;
  std::string out_dir;
};

// Writes refs.tsv, paired.tsv, nbest.tsv and hyps.tsv (rank-1 transcripts)
// into out_dir, creating it if needed.
void RunSynthStage(const SynthStageOptions &options);

struct AlignStageOptions {
  std::string corpus_path;        // paired TSV, or
  std::string nbest_corpus_path;  // N-best TSV plus references
  std::string refs_path;
  int nbest_train = 1;
  NBestWeighting weighting = NBestWeighting::kUniform;
  AlignmentConfig alignment;
  std::string out_path;
  std::string model_out_path;  // optional
};

struct AlignStageResult {
  EmTrace trace;
  size_t training_pairs = 0;
  size_t aligned = 0;
  size_t skipped = 0;
};

AlignStageResult RunAlignStage(const AlignStageOptions &options);

struct TrainStageOptions {
  std::string aligned_path;
  int order = 5;
  std::string model_out_path;
  std::string fst_out_path;  // optional
  DecodeConfig decode;
};

struct TrainStageResult {
  double perplexity = 0.0;
  int fallback_levels = 0;
  size_t num_states = 0;
  size_t num_arcs = 0;
};

TrainStageResult RunTrainStage(const TrainStageOptions &options);

struct ApplyStageOptions {
  std::string fst_path;
  std::string input_path;  // transcript TSV
  std::string out_path;
  DecodeConfig decode;
  int threads = 1;
};

struct ApplyStageResult {
  size_t utterances = 0;
  std::vector<std::string> failed_ids;
};

ApplyStageResult RunApplyStage(const ApplyStageOptions &options);

struct EvalStageOptions {
  std::string hyp_path;  // transcript TSV or decode output (rank-1 rows)
  std::string ref_path;  // transcript TSV
  std::optional<double> reference_wer;
  std::string baseline_report_path;
  std::string json_out_path;
  std::string tsv_out_path;
};

struct EvalStageResult {
  WerReport report;
  std::optional<double> relative_reduction;  // percent
};

// Throws EvalError listing up to 10 ids present in one file but not the
// other.
EvalStageResult RunEvalStage(const EvalStageOptions &options);

// Hypotheses from either a transcript TSV or a decode output TSV.
std::map<std::string, Tokens> LoadHypotheses(const std::string &path);

struct PipelineConfig {
  std::string out_dir = "pipeline_out";
  std::string phrases_path;
  std::string rules_path;
  uint64_t seed = 42;
  size_t train_utterances = 5000;
  size_t test_utterances = 500;
  int nbest_size = 25;
  double alternative_temperature = 1.0;
  double word_deletion_prob = 0.05;
  AlignmentConfig alignment;
  int order = 5;
  std::vector<int> nbest_train = {1, 25};
  DecodeConfig decode;
  std::optional<double> reference_wer;
  int threads = 1;

  // Sets one key from its text value; throws ParseError for unknown keys or
  // bad values. Relative paths resolve against base_dir.
  void Set(const std::string &key, const std::string &value,
           const std::string &base_dir = "");
};

// "key = value" lines; '#' starts a comment.
PipelineConfig ParsePipelineConfig(const std::vector<std::string> &lines,
                                   const std::string &source,
                                   const std::string &base_dir);
PipelineConfig LoadPipelineConfig(const std::string &path);

struct PipelineVariant {
  int nbest_train = 0;
  double corrected_wer = 0.0;
  double reduction_percent = 0.0;  // relative to the raw WER
  size_t decode_failures = 0;
  double perplexity = 0.0;
};

struct PipelineResult {
  double raw_wer = 0.0;
  std::vector<PipelineVariant> variants;
  std::string test_refs_path;
  std::string test_hyps_path;
  std::string summary;  // TSV table, also written to out_dir/summary.tsv
};

// synth -> align -> train -> apply -> eval for every nbest_train value.
PipelineResult RunPipeline(const PipelineConfig &config,
                           std::ostream *log = nullptr);

}  // namespace t2t

#endif  // T2T_PIPELINE_H_
