// cli_test.cc
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

#include <sstream>

#include "doctest.h"
#include "t2t/alignment.h"
#include "t2t/pipeline.h"
#include "t2t/text_util.h"
#include "test_util.h"

namespace t2t {
namespace {

using testing::ReadFile;
using testing::ScratchDir;
using testing::WriteFile;

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run Cli(std::vector<std::string> args) {
  args.insert(args.begin(), "t2t");
  std::ostringstream out, err;
  const int status = RunCli(args, out, err);
  return Run{status, out.str(), err.str()};
}

const char kRules[] =
    "buongiorno\tbonjour\t1.0\n"
    "sì\tshe\t0.6\n"
    "buonanotte\tbueno no te\t1.0\n";

const char kRefs[] =
    "r1\tbuongiorno a tutti\n"
    "r2\tsì grazie\n"
    "r3\tbuonanotte roma\n"
    "r4\tbuongiorno sì\n";

TEST_CASE("help enumerates flags with defaults") {
  auto apply = Cli({"apply", "--help"});
  CHECK(apply.status == 0);
  CHECK(apply.out.find("--nbest") != std::string::npos);
  CHECK(apply.out.find("500") != std::string::npos);
  CHECK(apply.out.find("--no-passthrough") != std::string::npos);
  auto align = Cli({"align", "--help"});
  CHECK(align.out.find("--max-x") != std::string::npos);
  CHECK(align.out.find("--iters") != std::string::npos);
  CHECK(align.out.find("20") != std::string::npos);
  auto train = Cli({"train", "--help"});
  CHECK(train.out.find("--order") != std::string::npos);
  auto top = Cli({"--help"});
  for (const char *cmd : {"synth", "align", "train", "apply", "eval", "pipeline"}) {
    CHECK(top.out.find(cmd) != std::string::npos);
  }
  CHECK(Cli({"frobnicate"}).status == 1);
  CHECK(Cli({}).status == 1);
}

TEST_CASE("synth -> align -> train -> apply -> eval") {
  ScratchDir dir("cli_chain");
  WriteFile(dir.File("rules.tsv"), kRules);
  WriteFile(dir.File("refs.tsv"), kRefs);
  const std::string out = dir.File("synth");

  auto synth = Cli({"synth", "--refs", dir.File("refs.tsv"), "--rules",
                    dir.File("rules.tsv"), "--seed", "42", "--nbest", "5",
                    "--deletion-prob", "0", "--out-dir", out});
  REQUIRE(synth.status == 0);
  for (const char *f : {"paired.tsv", "nbest.tsv", "refs.tsv", "hyps.tsv"}) {
    CHECK(std::filesystem::exists(out + "/" + f));
  }
  const std::string paired = ReadFile(out + "/paired.tsv");
  CHECK(paired.find("r1\tbonjour a tutti\tbuongiorno a tutti\n") != std::string::npos);

  // Re-running gives identical files.
  const std::string again = dir.File("synth2");
  Cli({"synth", "--refs", dir.File("refs.tsv"), "--rules", dir.File("rules.tsv"),
       "--nbest", "5", "--deletion-prob", "0", "--out-dir", again});
  CHECK(ReadFile(again + "/nbest.tsv") == ReadFile(out + "/nbest.tsv"));

  auto align = Cli({"align", "--corpus", out + "/paired.tsv", "--max-x", "3",
                    "--max-y", "3", "--iters", "20", "--out", dir.File("aligned.tsv"),
                    "--model-out", dir.File("align.model")});
  REQUIRE(align.status == 0);
  CHECK(align.out.find("iteration 1\tlog_likelihood") != std::string::npos);
  auto nbest = Cli({"align", "--nbest-corpus", out + "/nbest.tsv", "--refs",
                    out + "/refs.tsv", "--nbest-train", "5", "--out",
                    dir.File("aligned5.tsv")});
  REQUIRE(nbest.status == 0);
  CHECK(LoadAlignedCorpus(dir.File("aligned5.tsv")).size() >
        LoadAlignedCorpus(dir.File("aligned.tsv")).size());

  auto train = Cli({"train", "--aligned", dir.File("aligned.tsv"), "--order", "5",
                    "--out", dir.File("model.arpa"), "--fst", dir.File("out.fst")});
  REQUIRE(train.status == 0);
  CHECK(train.out.find("perplexity\t") != std::string::npos);
  CHECK(std::filesystem::exists(dir.File("model.arpa")));
  CHECK(std::filesystem::exists(dir.File("out.fst")));

  auto apply = Cli({"apply", "--fst", dir.File("out.fst"), "--input",
                    out + "/hyps.tsv", "--nbest", "500", "--out",
                    dir.File("corrected.tsv")});
  REQUIRE(apply.status == 0);

  auto raw = Cli({"eval", "--hyp", out + "/hyps.tsv", "--ref", out + "/refs.tsv"});
  auto fixed = Cli({"eval", "--hyp", dir.File("corrected.tsv"), "--ref",
                    out + "/refs.tsv", "--json-out", dir.File("report.json")});
  REQUIRE(raw.status == 0);
  REQUIRE(fixed.status == 0);
  CHECK(fixed.out.find("wer\t0\n") != std::string::npos);
  CHECK(raw.out.find("wer\t0\n") == std::string::npos);
  CHECK(std::filesystem::exists(dir.File("report.json")));
}

TEST_CASE("train with order 1") {
  ScratchDir dir("cli_order1");
  std::vector<AlignedUtterance> corpus = {
      {"a", {{{"she"}, {"sì"}}, {{"grazie"}, {"grazie"}}}, 1.0},
      {"b", {{{"bonjour"}, {"buongiorno"}}}, 1.0}};
  WriteAlignedCorpus(dir.File("aligned.tsv"), corpus);
  auto run = Cli({"train", "--aligned", dir.File("aligned.tsv"), "--order", "1",
                  "--out", dir.File("m.arpa")});
  REQUIRE(run.status == 0);
  auto model = LoadJointNGramModel(dir.File("m.arpa"));
  CHECK(model.order() == 1);
  CHECK(model.ContextMass({}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exit codes") {
  ScratchDir dir("cli_codes");
  WriteFile(dir.File("refs.tsv"), kRefs);
  WriteFile(dir.File("bad_rules.tsv"), "a\tb\t0.5\nc\td\n");

  auto missing = Cli({"synth", "--refs", dir.File("refs.tsv"), "--rules",
                      dir.File("nope.tsv"), "--out-dir", dir.File("o")});
  CHECK(missing.status == 2);
  auto bad = Cli({"synth", "--refs", dir.File("refs.tsv"), "--rules",
                  dir.File("bad_rules.tsv"), "--out-dir", dir.File("o")});
  CHECK(bad.status == 2);
  CHECK(bad.err.find("bad_rules.tsv:2:") != std::string::npos);

  WriteFile(dir.File("unalignable.tsv"), "u1\t\tsì\nu2\t\tno\n");
  auto align = Cli({"align", "--corpus", dir.File("unalignable.tsv"),
                    "--no-insertions", "--out", dir.File("a.tsv")});
  CHECK(align.status == 3);

  WriteFile(dir.File("empty.tsv"), "");
  auto train = Cli({"train", "--aligned", dir.File("empty.tsv"), "--out",
                    dir.File("m.arpa")});
  CHECK(train.status == 4);

  WriteFile(dir.File("broken.fst"), "T2TFST1\norder\t2\nstates\tx\n");
  auto apply = Cli({"apply", "--fst", dir.File("broken.fst"), "--input",
                    dir.File("refs.tsv"), "--out", dir.File("c.tsv")});
  CHECK(apply.status == 5);

  WriteFile(dir.File("hyps.tsv"), "r1\tbuongiorno\nzz\tciao\n");
  auto eval = Cli({"eval", "--hyp", dir.File("hyps.tsv"), "--ref", dir.File("refs.tsv")});
  CHECK(eval.status == 6);
  CHECK(eval.err.find("zz") != std::string::npos);
  CHECK(eval.err.find("r2") != std::string::npos);
}

TEST_CASE("passthrough can be disabled") {
  ScratchDir dir("cli_passthrough");
  std::vector<AlignedUtterance> corpus(
      4, AlignedUtterance{"a", {{{"bonjour"}, {"buongiorno"}}}, 1.0});
  WriteAlignedCorpus(dir.File("aligned.tsv"), corpus);
  REQUIRE(Cli({"train", "--aligned", dir.File("aligned.tsv"), "--order", "2",
               "--out", dir.File("m.arpa"), "--fst", dir.File("m.fst")})
              .status == 0);
  WriteFile(dir.File("in.tsv"), "a\tbonjour\nb\troma\n");
  auto on = Cli({"apply", "--fst", dir.File("m.fst"), "--input", dir.File("in.tsv"),
                 "--out", dir.File("on.tsv")});
  CHECK(on.status == 0);
  CHECK(ReadFile(dir.File("on.tsv")).find("b\t1\tinf") == std::string::npos);
  auto off = Cli({"apply", "--fst", dir.File("m.fst"), "--input", dir.File("in.tsv"),
                  "--no-passthrough", "--out", dir.File("off.tsv")});
  CHECK(off.status == 0);
  const std::string rows = ReadFile(dir.File("off.tsv"));
  CHECK(rows.find("a\t1\t") != std::string::npos);
  CHECK(rows.find("a\t1\tinf") == std::string::npos);
  CHECK(rows.find("b\t1\tinf\troma\n") != std::string::npos);
  CHECK(off.err.find("'b'") != std::string::npos);
}

TEST_CASE("eval reports NWER and relative reduction") {
  ScratchDir dir("cli_eval");
  std::string ref_line = "u\t", hyp_line = "u\t";
  for (int i = 0; i < 100; ++i) {
    ref_line += (i ? " w" : "w") + std::to_string(i);
    hyp_line += (i ? " " : "") + (i < 27 ? std::string("x") : "w" + std::to_string(i));
  }
  WriteFile(dir.File("ref.tsv"), ref_line + "\n");
  WriteFile(dir.File("hyp.tsv"), hyp_line + "\n");
  WriteFile(dir.File("base.json"), "{\"wer\": 0.5, \"nwer\": 1.00}\n");

  auto same = Cli({"eval", "--hyp", dir.File("ref.tsv"), "--ref", dir.File("ref.tsv")});
  CHECK(same.status == 0);
  CHECK(same.out.find("wer\t0\n") != std::string::npos);

  auto run = Cli({"eval", "--hyp", dir.File("hyp.tsv"), "--ref", dir.File("ref.tsv"),
                  "--reference-wer", "0.5", "--baseline-report", dir.File("base.json"),
                  "--tsv-out", dir.File("report.tsv")});
  REQUIRE(run.status == 0);
  CHECK(run.out.find("wer\t0.27\n") != std::string::npos);
  CHECK(run.out.find("nwer\t0.54\n") != std::string::npos);
  CHECK(run.out.find("relative_reduction\t46.0%\n") != std::string::npos);
  CHECK(ReadFile(dir.File("report.tsv")).find("TOTAL\t100\t27\t0\t0\t0.27\n") !=
        std::string::npos);
}

TEST_CASE("pipeline config parsing") {
  auto cfg = ParsePipelineConfig(
      testing::Lines("# c\nphrases = p.txt\nrules: r.tsv\nnbest_train = 1,25\n"
                     "order = 4  # trailing\npassthrough = false\n"),
      "cfg", "/base");
  CHECK(cfg.phrases_path == "/base/p.txt");
  CHECK(cfg.rules_path == "/base/r.tsv");
  CHECK(cfg.nbest_train == std::vector<int>{1, 25});
  CHECK(cfg.order == 4);
  CHECK_FALSE(cfg.decode.passthrough);
  CHECK_THROWS_AS(ParsePipelineConfig({"bogus = 1"}, "cfg", ""), ParseError);
  CHECK_THROWS_AS(ParsePipelineConfig({"order = x"}, "cfg", ""), ParseError);
  CHECK_THROWS_AS(ParsePipelineConfig({"order"}, "cfg", ""), ParseError);
}

TEST_CASE("pipeline command") {
  ScratchDir dir("cli_pipeline");
  WriteFile(dir.File("phrases.txt"),
            "buongiorno\nbuonanotte a tutti\nsì grazie\nciao roma\nbuongiorno sì\n");
  WriteFile(dir.File("rules.tsv"), kRules);
  WriteFile(dir.File("empty_rules.tsv"), "# nothing\n");
  const std::string config =
      "phrases = phrases.txt\nrules = rules.tsv\ntrain_utterances = 200\n"
      "test_utterances = 40\nnbest_size = 5\norder = 3\nnbest_train = 1,5\n"
      "decode_nbest = 50\n";
  WriteFile(dir.File("p.conf"), config);

  auto run = Cli({"pipeline", "--config", dir.File("p.conf"), "--set",
                  "out_dir=" + dir.File("out")});
  REQUIRE(run.status == 0);
  auto rows = testing::Lines(run.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].rfind("raw\t", 0) == 0);
  CHECK(rows[2].rfind("mapped\t1\t", 0) == 0);
  CHECK(rows[3].rfind("mapped\t5\t", 0) == 0);
  double raw = 0, mapped = 0;
  ParseDouble(SplitFields(rows[1])[2], &raw);
  ParseDouble(SplitFields(rows[2])[2], &mapped);
  CHECK(mapped < raw);
  CHECK(ReadFile(dir.File("out/summary.tsv")) == run.out);

  // Without rules only deletions are left to undo; the mapping must not do
  // worse than the raw hypotheses.
  auto identity = Cli({"pipeline", "--config", dir.File("p.conf"), "--set",
                       "rules=" + dir.File("empty_rules.tsv"), "--set",
                       "out_dir=" + dir.File("out_id"), "--set", "nbest_train=1"});
  REQUIRE(identity.status == 0);
  auto id_rows = testing::Lines(identity.out);
  REQUIRE(id_rows.size() == 3);
  double id_raw = 0, id_mapped = 0;
  ParseDouble(SplitFields(id_rows[1])[2], &id_raw);
  ParseDouble(SplitFields(id_rows[2])[2], &id_mapped);
  CHECK(id_mapped <= id_raw);

  auto bad = Cli({"pipeline", "--config", dir.File("p.conf"), "--set", "order"});
  CHECK(bad.status == 2);
  auto missing = Cli({"pipeline", "--config", dir.File("missing.conf")});
  CHECK(missing.status == 2);
}

}  // namespace
}  // namespace t2t
