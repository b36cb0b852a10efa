// cli.cc
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

#include "t2t/cli.h"

#include <cmath>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "t2t/error.h"
#include "t2t/pipeline.h"
#include "t2t/text_util.h"

namespace t2t {
namespace {

std::string Percent(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f%%", value);
  return buf;
}

void PrintReport(const EvalStageResult &result, std::ostream &out) {
  const WerReport &r = result.report;
  out << "utterances\t" << r.utterances.size() << '\n'
      << "ref_words\t" << r.reference_words << '\n'
      << "sub\t" << r.ops.substitutions << '\n'
      << "del\t" << r.ops.deletions << '\n'
      << "ins\t" << r.ops.insertions << '\n'
      << "wer\t" << FormatShortest(r.wer) << '\n';
  if (r.nwer) out << "nwer\t" << FormatShortest(*r.nwer) << '\n';
  if (result.relative_reduction) {
    out << "relative_reduction\t" << Percent(*result.relative_reduction)
        << '\n';
  }
}

void AddDecodeFlags(CLI::App *cmd, DecodeConfig *decode, bool *no_passthrough) {
  cmd->add_option("--passthrough-penalty", decode->passthrough_penalty,
                  "Cost in nats of copying an unmapped token");
  cmd->add_flag("--no-passthrough", *no_passthrough,
                "Do not pass unmapped tokens through");
}

}  // namespace

int RunCli(const std::vector<std::string> &args, std::ostream &out,
           std::ostream &err) {
  CLI::App app{"Post-recognition text-to-text mapping toolkit", "t2t"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  // synth
  SynthStageOptions synth;
  auto *synth_cmd =
      app.add_subcommand("synth", "Corrupt clean references into paired and "
                                  "N-best hypothesis corpora");
  synth_cmd->add_option("--refs", synth.refs_path, "Reference transcript TSV");
  synth_cmd->add_option("--phrases", synth.phrases_path,
                        "Phrase list to compose references from");
  synth_cmd->add_option("--count", synth.count,
                        "Utterances to compose from --phrases");
  synth_cmd->add_option("--id-prefix", synth.id_prefix,
                        "Id prefix for composed utterances");
  synth_cmd->add_option("--rules", synth.rules_path, "Corruption rule TSV")
      ->required();
  synth_cmd->add_option("--seed", synth.seed, "Random seed");
  synth_cmd->add_option("--nbest", synth.synth.nbest_size,
                        "Hypotheses per utterance");
  synth_cmd->add_option("--temperature", synth.synth.alternative_temperature,
                        "Flattening of rule probabilities for ranks 2..n");
  synth_cmd->add_option("--deletion-prob", synth.word_deletion_prob,
                        "Per-word deletion probability");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")
      ->required();

  // align
  AlignStageOptions align;
  std::string weighting = "uniform";
  bool no_deletions = false, no_insertions = false;
  int align_threads = 1;
  auto *align_cmd = app.add_subcommand(
      "align", "Train a many-to-many alignment model and align a corpus");
  align_cmd->add_option("--corpus", align.corpus_path, "Paired corpus TSV");
  align_cmd->add_option("--nbest-corpus", align.nbest_corpus_path,
                        "N-best corpus TSV (needs --refs)");
  align_cmd->add_option("--refs", align.refs_path,
                        "Reference transcript TSV for --nbest-corpus");
  align_cmd->add_option("--nbest-train", align.nbest_train,
                        "Hypotheses per utterance used for training");
  align_cmd->add_option("--nbest-weighting", weighting,
                        "Weight of expanded pairs")
      ->check(CLI::IsMember({"uniform", "rank"}));
  align_cmd->add_option("--max-x", align.alignment.max_x,
                        "Longest hypothesis run per symbol");
  align_cmd->add_option("--max-y", align.alignment.max_y,
                        "Longest reference run per symbol");
  align_cmd->add_flag("--no-deletions", no_deletions,
                      "Forbid symbols with an empty reference side");
  align_cmd->add_flag("--no-insertions", no_insertions,
                      "Forbid symbols with an empty hypothesis side");
  align_cmd->add_option("--iters", align.alignment.max_iterations,
                        "Maximum EM iterations");
  align_cmd->add_option("--epsilon", align.alignment.convergence_epsilon,
                        "Relative log-likelihood convergence threshold");
  align_cmd->add_option("--threads", align_threads,
                        "Worker threads (0 = all cores)");
  align_cmd->add_option("--out", align.out_path, "Aligned corpus output")
      ->required();
  align_cmd->add_option("--model-out", align.model_out_path,
                        "Alignment model output");

  // train
  TrainStageOptions train;
  bool train_no_passthrough = false;
  auto *train_cmd = app.add_subcommand(
      "train", "Estimate a joint n-gram model and build the mapping transducer");
  train_cmd->add_option("--aligned", train.aligned_path, "Aligned corpus")
      ->required();
  train_cmd->add_option("--order", train.order, "N-gram order");
  train_cmd->add_option("--out", train.model_out_path, "Model output")
      ->required();
  train_cmd->add_option("--fst", train.fst_out_path, "Transducer output");
  AddDecodeFlags(train_cmd, &train.decode, &train_no_passthrough);

  // apply
  ApplyStageOptions apply;
  bool apply_no_passthrough = false;
  auto *apply_cmd =
      app.add_subcommand("apply", "Decode transcripts through a transducer");
  apply_cmd->add_option("--fst", apply.fst_path, "Transducer file")
      ->required();
  apply_cmd->add_option("--input", apply.input_path, "Transcript TSV")
      ->required();
  apply_cmd->add_option("--out", apply.out_path, "Decode output TSV")
      ->required();
  apply_cmd->add_option("--nbest", apply.decode.nbest,
                        "Candidates explored per utterance");
  apply_cmd->add_option("--beam", apply.decode.beam,
                        "Cost width above the best complete path");
  apply_cmd->add_option("--topk", apply.decode.output_top_k,
                        "Rows written per utterance");
  apply_cmd->add_flag("--no-passthrough", apply_no_passthrough,
                      "Disable copying of unmapped tokens");
  apply_cmd->add_option("--threads", apply.threads,
                        "Worker threads (0 = all cores)");

  // eval
  EvalStageOptions eval;
  double reference_wer = 0.0;
  auto *eval_cmd =
      app.add_subcommand("eval", "Score hypotheses against references");
  eval_cmd->add_option("--hyp", eval.hyp_path,
                       "Hypothesis transcript or decode output TSV")
      ->required();
  eval_cmd->add_option("--ref", eval.ref_path, "Reference transcript TSV")
      ->required();
  auto *ref_wer_opt = eval_cmd->add_option(
      "--reference-wer", reference_wer, "Reference WER enabling NWER");
  eval_cmd->add_option("--baseline-report", eval.baseline_report_path,
                       "JSON report to compute a relative reduction against");
  eval_cmd->add_option("--json-out", eval.json_out_path, "JSON report output");
  eval_cmd->add_option("--tsv-out", eval.tsv_out_path, "TSV report output");

  // pipeline
  std::string config_path;
  std::vector<std::string> overrides;
  auto *pipe_cmd = app.add_subcommand(
      "pipeline", "Run synth, align, train, apply and eval from a config file");
  pipe_cmd->add_option("--config", config_path, "Pipeline config file")
      ->required();
  pipe_cmd->add_option("--set", overrides, "key=value override");

  std::vector<const char *> argv;
  for (const auto &a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kGeneric);
  }

  try {
    if (synth_cmd->parsed()) {
      RunSynthStage(synth);
      out << "wrote " << synth.out_dir << '\n';
    } else if (align_cmd->parsed()) {
      align.weighting =
          weighting == "rank" ? NBestWeighting::kRankDecay : NBestWeighting::kUniform;
      align.alignment.allow_source_deletion = !no_deletions;
      align.alignment.allow_target_insertion = !no_insertions;
      align.alignment.num_threads = ResolveThreads(align_threads);
      AlignStageResult r = RunAlignStage(align);
      for (size_t i = 0; i < r.trace.log_likelihoods.size(); ++i) {
        out << "iteration " << i + 1 << "\tlog_likelihood "
            << FormatShortest(r.trace.log_likelihoods[i]) << '\n';
      }
      out << "pairs\t" << r.training_pairs << "\naligned\t" << r.aligned
          << "\nskipped\t" << r.skipped << "\nsymbols\t" << r.trace.num_symbols
          << '\n';
    } else if (train_cmd->parsed()) {
      train.decode.passthrough = !train_no_passthrough;
      TrainStageResult r = RunTrainStage(train);
      out << "perplexity\t" << FormatShortest(r.perplexity) << '\n';
      if (!train.fst_out_path.empty()) {
        out << "states\t" << r.num_states << "\narcs\t" << r.num_arcs << '\n';
      }
      if (r.fallback_levels > 0) {
        err << "warning: " << r.fallback_levels
            << " order(s) used fallback discounts\n";
      }
    } else if (apply_cmd->parsed()) {
      apply.decode.passthrough = !apply_no_passthrough;
      ApplyStageResult r = RunApplyStage(apply);
      out << "utterances\t" << r.utterances << "\nfailed\t"
          << r.failed_ids.size() << '\n';
      for (const auto &id : r.failed_ids) {
        err << "no path for '" << id << "', input copied\n";
      }
    } else if (eval_cmd->parsed()) {
      if (ref_wer_opt->count() > 0) eval.reference_wer = reference_wer;
      PrintReport(RunEvalStage(eval), out);
    } else if (pipe_cmd->parsed()) {
      PipelineConfig config = LoadPipelineConfig(config_path);
      for (const auto &kv : overrides) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos) {
          throw ParseError("--set expects key=value, got '" + kv + "'");
        }
        config.Set(kv.substr(0, eq), kv.substr(eq + 1));
      }
      PipelineResult r = RunPipeline(config, &err);
      out << r.summary;
    }
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::kGeneric);
  }
  return 0;
}

}  // namespace t2t
