// pipeline.cc
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

#include "t2t/pipeline.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "t2t/error.h"
#include "t2t/ngram.h"
#include "t2t/text_util.h"

namespace t2t {
namespace fs = std::filesystem;

int ResolveThreads(int requested) {
  int threads = requested > 0
                    ? requested
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char *cap = std::getenv("T2T_THREADS")) {
    long long value = 0;
    if (ParseInt(cap, &value) && value >= 1) {
      threads = std::min<int>(threads, static_cast<int>(value));
    }
  }
  return threads;
}

namespace {

void EnsureDir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ExitCode::kGeneric, "cannot create " + dir);
}

std::string PathIn(const std::string &dir, const std::string &name) {
  return (fs::path(dir) / name).string();
}

std::string ReadWholeFile(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void RunSynthStage(const SynthStageOptions &options) {
  std::vector<Utterance> refs;
  if (!options.refs_path.empty()) {
    refs = LoadTranscripts(options.refs_path);
  } else if (!options.phrases_path.empty()) {
    refs = ComposeReferenceCorpus(LoadPhrases(options.phrases_path),
                                  options.count, options.seed,
                                  options.id_prefix);
  } else {
    throw InvalidArgument("synth needs references or a phrase list");
  }
  CorruptionModel model;
  model.rules = LoadRules(options.rules_path);
  model.seed = options.seed;
  model.word_deletion_prob = options.word_deletion_prob;
  SynthOutput out = GenerateCorpus(refs, model, options.synth);

  std::vector<Utterance> hyps;
  for (const auto &p : out.paired) hyps.push_back(Utterance{p.id, p.hypothesis});
  EnsureDir(options.out_dir);
  WriteTranscripts(PathIn(options.out_dir, "refs.tsv"), refs);
  WritePairedCorpus(PathIn(options.out_dir, "paired.tsv"), out.paired);
  WriteNBestCorpus(PathIn(options.out_dir, "nbest.tsv"), out.nbest);
  WriteTranscripts(PathIn(options.out_dir, "hyps.tsv"), hyps);
}

AlignStageResult RunAlignStage(const AlignStageOptions &options) {
  std::vector<UtterancePair> pairs;
  if (!options.corpus_path.empty()) {
    pairs = LoadPairedCorpus(options.corpus_path);
  } else if (!options.nbest_corpus_path.empty()) {
    if (options.refs_path.empty()) {
      throw InvalidArgument("N-best training needs a reference file");
    }
    pairs = ExpandNBestToPairs(LoadNBestCorpus(options.nbest_corpus_path),
                               ReferenceMap(LoadTranscripts(options.refs_path)),
                               options.nbest_train, options.weighting);
  } else {
    throw InvalidArgument("align needs a paired corpus or an N-best corpus");
  }
  AlignStageResult result;
  result.training_pairs = pairs.size();
  AlignmentModel model =
      TrainAlignmentModel(pairs, options.alignment, &result.trace);
  auto aligned = AlignCorpus(pairs, model, options.alignment, &result.skipped);
  result.aligned = aligned.size();
  if (aligned.empty()) throw AlignmentError("no pair could be aligned");
  WriteAlignedCorpus(options.out_path, aligned);
  if (!options.model_out_path.empty()) {
    WriteTextFile(options.model_out_path, FormatAlignmentModel(model));
  }
  return result;
}

TrainStageResult RunTrainStage(const TrainStageOptions &options) {
  auto aligned = LoadAlignedCorpus(options.aligned_path);
  if (aligned.empty()) throw EstimationError("aligned corpus is empty");
  NGramCounts counts;
  try {
    counts = CountNGrams(aligned, options.order);
  } catch (const InvalidArgument &e) {
    throw EstimationError(e.what());
  }
  Discounts discounts = EstimateDiscounts(counts);
  JointNGramModel model = EstimateModifiedKneserNey(counts, discounts);
  TrainStageResult result;
  result.fallback_levels = discounts.fallback_levels();
  result.perplexity = Perplexity(model, aligned);
  WriteJointNGramModel(options.model_out_path, model);
  if (!options.fst_out_path.empty()) {
    MappingTransducer fst = BuildTransducer(model, options.decode);
    result.num_states = fst.num_states();
    result.num_arcs = fst.num_arcs();
    WriteTransducer(options.fst_out_path, fst);
  }
  return result;
}

ApplyStageResult RunApplyStage(const ApplyStageOptions &options) {
  MappingTransducer fst = LoadTransducer(options.fst_path);
  auto inputs = LoadTranscripts(options.input_path);
  auto results = ApplyCorpus(fst, inputs, options.decode,
                             ResolveThreads(options.threads));
  ApplyStageResult out;
  out.utterances = results.size();
  for (const auto &r : results) {
    if (r.failed) out.failed_ids.push_back(r.id);
  }
  WriteTextFile(options.out_path, FormatDecodeResults(results));
  return out;
}

std::map<std::string, Tokens> LoadHypotheses(const std::string &path) {
  auto lines = ReadLines(path);
  std::map<std::string, Tokens> hyps;
  if (lines.empty()) return hyps;
  const bool decode_format = SplitFields(lines[0]).size() == 4;
  if (!decode_format) return ReferenceMap(ParseTranscripts(lines, path));
  for (size_t i = 0; i < lines.size(); ++i) {
    auto f = SplitFields(lines[i]);
    long long rank = 0;
    if (f.size() != 4 || !ParseInt(f[1], &rank)) {
      throw ParseError(path, i + 1, "expected decode output columns");
    }
    if (rank != 1) continue;
    if (hyps.count(f[0])) throw ParseError(path, i + 1, "duplicate id " + f[0]);
    try {
      hyps[f[0]] = NormalizeText(f[3]);
    } catch (const ParseError &e) {
      throw ParseError(path, i + 1, e.what());
    }
  }
  return hyps;
}

EvalStageResult RunEvalStage(const EvalStageOptions &options) {
  auto refs = LoadTranscripts(options.ref_path);
  auto hyps = LoadHypotheses(options.hyp_path);
  std::vector<std::string> missing;
  std::map<std::string, bool> ref_ids;
  for (const auto &r : refs) {
    ref_ids[r.id] = true;
    if (!hyps.count(r.id)) missing.push_back(r.id);
  }
  for (const auto &[id, tokens] : hyps) {
    if (!ref_ids.count(id)) missing.push_back(id);
  }
  if (!missing.empty()) {
    std::string list;
    for (size_t i = 0; i < missing.size() && i < 10; ++i) {
      list += (i ? ", " : "") + missing[i];
    }
    throw EvalError(std::to_string(missing.size()) +
                    " ids differ between hypothesis and reference files: " +
                    list);
  }
  std::vector<ScoredPair> pairs;
  for (const auto &r : refs) pairs.push_back(ScoredPair{r.id, hyps[r.id], r.tokens});
  EvalStageResult result;
  result.report = CorpusWer(pairs, options.reference_wer);
  if (!options.baseline_report_path.empty()) {
    ReportSummary base = ParseReportJson(ReadWholeFile(options.baseline_report_path));
    const bool use_nwer = base.nwer && result.report.nwer;
    result.relative_reduction =
        RelativeReduction(use_nwer ? *base.nwer : base.wer,
                          use_nwer ? *result.report.nwer : result.report.wer);
  }
  if (!options.json_out_path.empty()) {
    WriteTextFile(options.json_out_path, FormatReportJson(result.report));
  }
  if (!options.tsv_out_path.empty()) {
    WriteTextFile(options.tsv_out_path, FormatReportTsv(result.report));
  }
  return result;
}

void PipelineConfig::Set(const std::string &key, const std::string &value,
                         const std::string &base_dir) {
  auto bad = [&]() {
    return ParseError("bad value '" + value + "' for " + key);
  };
  auto as_int = [&]() {
    long long v = 0;
    if (!ParseInt(value, &v)) throw bad();
    return v;
  };
  auto as_double = [&]() {
    double v = 0;
    if (!ParseDouble(value, &v)) throw bad();
    return v;
  };
  auto as_path = [&]() {
    fs::path p(value);
    if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
    return p.lexically_normal().string();
  };
  if (key == "out_dir") {
    out_dir = as_path();
  } else if (key == "phrases") {
    phrases_path = as_path();
  } else if (key == "rules") {
    rules_path = as_path();
  } else if (key == "seed") {
    seed = static_cast<uint64_t>(as_int());
  } else if (key == "train_utterances") {
    train_utterances = static_cast<size_t>(as_int());
  } else if (key == "test_utterances") {
    test_utterances = static_cast<size_t>(as_int());
  } else if (key == "nbest_size") {
    nbest_size = static_cast<int>(as_int());
  } else if (key == "alternative_temperature") {
    alternative_temperature = as_double();
  } else if (key == "word_deletion_prob") {
    word_deletion_prob = as_double();
  } else if (key == "max_x") {
    alignment.max_x = static_cast<int>(as_int());
  } else if (key == "max_y") {
    alignment.max_y = static_cast<int>(as_int());
  } else if (key == "em_iterations") {
    alignment.max_iterations = static_cast<int>(as_int());
  } else if (key == "em_epsilon") {
    alignment.convergence_epsilon = as_double();
  } else if (key == "order") {
    order = static_cast<int>(as_int());
  } else if (key == "nbest_train") {
    nbest_train.clear();
    for (const auto &part : SplitFields(value, ',')) {
      long long v = 0;
      auto trimmed = SplitWhitespace(part);
      if (trimmed.size() != 1 || !ParseInt(trimmed[0], &v) || v < 1) throw bad();
      nbest_train.push_back(static_cast<int>(v));
    }
    if (nbest_train.empty()) throw bad();
  } else if (key == "decode_nbest") {
    decode.nbest = static_cast<int>(as_int());
  } else if (key == "passthrough_penalty") {
    decode.passthrough_penalty = as_double();
  } else if (key == "passthrough") {
    if (value != "true" && value != "false") throw bad();
    decode.passthrough = value == "true";
  } else if (key == "reference_wer") {
    reference_wer = as_double();
  } else if (key == "threads") {
    threads = static_cast<int>(as_int());
  } else {
    throw ParseError("unknown config key '" + key + "'");
  }
}

PipelineConfig ParsePipelineConfig(const std::vector<std::string> &lines,
                                   const std::string &source,
                                   const std::string &base_dir) {
  PipelineConfig config;
  for (size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i].substr(0, lines[i].find('#'));
    if (SplitWhitespace(line).empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) eq = line.find(':');
    if (eq == std::string::npos) {
      throw ParseError(source, i + 1, "expected 'key = value'");
    }
    auto key = SplitWhitespace(line.substr(0, eq));
    auto value = SplitWhitespace(line.substr(eq + 1));
    if (key.size() != 1 || value.size() != 1) {
      throw ParseError(source, i + 1, "expected 'key = value'");
    }
    try {
      config.Set(key[0], value[0], base_dir);
    } catch (const ParseError &e) {
      throw ParseError(source, i + 1, e.what());
    }
  }
  return config;
}

PipelineConfig LoadPipelineConfig(const std::string &path) {
  return ParsePipelineConfig(ReadLines(path), path,
                             fs::path(path).parent_path().string());
}

PipelineResult RunPipeline(const PipelineConfig &config, std::ostream *log) {
  auto say = [log](const std::string &msg) {
    if (log) *log << msg << std::endl;
  };
  if (config.phrases_path.empty() || config.rules_path.empty()) {
    throw ParseError("pipeline config needs 'phrases' and 'rules'");
  }
  const std::string train_dir = PathIn(config.out_dir, "train");
  const std::string test_dir = PathIn(config.out_dir, "test");

  SynthStageOptions synth;
  synth.phrases_path = config.phrases_path;
  synth.rules_path = config.rules_path;
  synth.word_deletion_prob = config.word_deletion_prob;
  synth.synth.nbest_size = config.nbest_size;
  synth.synth.alternative_temperature = config.alternative_temperature;

  synth.count = config.train_utterances;
  synth.id_prefix = "train";
  synth.seed = config.seed;
  synth.out_dir = train_dir;
  say("synth: " + std::to_string(config.train_utterances) +
      " training utterances -> " + train_dir);
  RunSynthStage(synth);

  synth.count = config.test_utterances;
  synth.id_prefix = "test";
  synth.seed = config.seed + 1;
  synth.synth.nbest_size = 1;
  synth.out_dir = test_dir;
  say("synth: " + std::to_string(config.test_utterances) +
      " test utterances -> " + test_dir);
  RunSynthStage(synth);

  PipelineResult result;
  result.test_refs_path = PathIn(test_dir, "refs.tsv");
  result.test_hyps_path = PathIn(test_dir, "hyps.tsv");
  EvalStageOptions raw_eval;
  raw_eval.hyp_path = result.test_hyps_path;
  raw_eval.ref_path = result.test_refs_path;
  raw_eval.reference_wer = config.reference_wer;
  raw_eval.json_out_path = PathIn(config.out_dir, "raw_report.json");
  result.raw_wer = RunEvalStage(raw_eval).report.wer;
  say("eval: raw WER " + FormatShortest(result.raw_wer));

  AlignmentConfig align_cfg = config.alignment;
  align_cfg.num_threads = ResolveThreads(config.threads);
  for (int n : config.nbest_train) {
    const std::string dir = PathIn(config.out_dir, "nbest" + std::to_string(n));
    EnsureDir(dir);
    AlignStageOptions align;
    align.nbest_corpus_path = PathIn(train_dir, "nbest.tsv");
    align.refs_path = PathIn(train_dir, "refs.tsv");
    align.nbest_train = n;
    align.alignment = align_cfg;
    align.out_path = PathIn(dir, "aligned.tsv");
    align.model_out_path = PathIn(dir, "align.model");
    AlignStageResult aligned = RunAlignStage(align);
    say("align[" + std::to_string(n) + "]: " +
        std::to_string(aligned.training_pairs) + " pairs, " +
        std::to_string(aligned.trace.log_likelihoods.size()) +
        " EM iterations, " + std::to_string(aligned.skipped) + " skipped");

    TrainStageOptions train;
    train.aligned_path = align.out_path;
    train.order = config.order;
    train.model_out_path = PathIn(dir, "model.arpa");
    train.fst_out_path = PathIn(dir, "mapping.fst");
    train.decode = config.decode;
    TrainStageResult trained = RunTrainStage(train);
    say("train[" + std::to_string(n) + "]: perplexity " +
        FormatShortest(trained.perplexity) + ", " +
        std::to_string(trained.num_states) + " states, " +
        std::to_string(trained.num_arcs) + " arcs");

    ApplyStageOptions apply;
    apply.fst_path = train.fst_out_path;
    apply.input_path = result.test_hyps_path;
    apply.out_path = PathIn(dir, "corrected.tsv");
    apply.decode = config.decode;
    apply.threads = config.threads;
    ApplyStageResult applied = RunApplyStage(apply);

    EvalStageOptions eval;
    eval.hyp_path = apply.out_path;
    eval.ref_path = result.test_refs_path;
    eval.reference_wer = config.reference_wer;
    eval.json_out_path = PathIn(dir, "report.json");
    EvalStageResult evaluated = RunEvalStage(eval);

    PipelineVariant variant;
    variant.nbest_train = n;
    variant.corrected_wer = evaluated.report.wer;
    variant.reduction_percent =
        result.raw_wer > 0 ? RelativeReduction(result.raw_wer, variant.corrected_wer)
                           : 0.0;
    variant.decode_failures = applied.failed_ids.size();
    variant.perplexity = trained.perplexity;
    say("eval[" + std::to_string(n) + "]: corrected WER " +
        FormatShortest(variant.corrected_wer));
    result.variants.push_back(variant);
  }

  std::ostringstream table;
  table << "system\tnbest_train\twer\trelative_reduction_percent\n";
  table << "raw\t-\t" << FormatShortest(result.raw_wer) << "\t0\n";
  for (const auto &v : result.variants) {
    table << "mapped\t" << v.nbest_train << '\t'
          << FormatShortest(v.corrected_wer) << '\t'
          << FormatShortest(v.reduction_percent) << '\n';
  }
  result.summary = table.str();
  WriteTextFile(PathIn(config.out_dir, "summary.tsv"), result.summary);
  return result;
}

}  // namespace t2t
