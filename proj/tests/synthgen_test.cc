// synthgen_test.cc
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

#include "t2t/synthgen.h"

#include <set>

#include "doctest.h"
#include "t2t/error.h"
#include "test_util.h"

namespace t2t {
namespace {

CorruptionModel Model(std::vector<CorruptionRule> rules, double deletion,
                      uint64_t seed = 42) {
  CorruptionModel m;
  m.rules = std::move(rules);
  m.word_deletion_prob = deletion;
  m.seed = seed;
  return m;
}

TEST_CASE("corruption examples") {
  RandomStream stream(1);
  CHECK(CorruptUtterance({"buongiorno"}, Model({{{"buongiorno"}, {"bonjour"}, 1.0}}, 0.0),
                         stream) == Tokens{"bonjour"});
  Tokens ref = {"accendi", "la", "luce"};
  CHECK(CorruptUtterance(ref, Model({}, 0.0), stream) == ref);
  // Deletion probability 1 is outside the validated range; a single draw
  // still applies it.
  CHECK(CorruptUtterance({"sì", "grazie"}, Model({{{"sì"}, {"she"}, 1.0}}, 1.0),
                         stream) == Tokens{"she"});
}

TEST_CASE("longest match wins, then file order") {
  RandomStream stream(3);
  auto model = Model({{{"sì"}, {"she"}, 1.0},
                      {{"sì", "grazie"}, {"see", "gracias"}, 1.0},
                      {{"sì"}, {"c"}, 1.0}},
                     0.0);
  CHECK(CorruptUtterance({"sì", "grazie", "sì"}, model, stream) ==
        Tokens{"see", "gracias", "she"});
  auto empty = Model({{{"per", "favore"}, {}, 1.0}}, 0.0);
  CHECK(CorruptUtterance({"ripeti", "per", "favore"}, empty, stream) ==
        Tokens{"ripeti"});
}

TEST_CASE("random streams are deterministic and distinct") {
  auto a = RandomStream::ForUtterance(42, 7);
  auto b = RandomStream::ForUtterance(42, 7);
  auto c = RandomStream::ForUtterance(42, 8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.Uniform();
    CHECK(x == b.Uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    differs |= x != c.Uniform();
  }
  CHECK(differs);
  RandomStream d(5);
  for (int i = 0; i < 1000; ++i) CHECK(d.Below(3) < 3);
}

TEST_CASE("deletion rate concentrates around its probability") {
  std::vector<Utterance> refs;
  size_t tokens = 0;
  for (int i = 0; tokens < 10000; ++i) {
    Utterance u{"u" + std::to_string(i), {"uno", "due", "tre", "quattro", "cinque"}};
    tokens += u.tokens.size();
    refs.push_back(u);
  }
  SynthConfig cfg;
  cfg.nbest_size = 1;
  auto out = GenerateCorpus(refs, Model({}, 0.05), cfg);
  size_t kept = 0;
  for (const auto &p : out.paired) kept += p.hypothesis.size();
  const double deleted = 1.0 - static_cast<double>(kept) / tokens;
  CHECK(deleted > 0.04);
  CHECK(deleted < 0.06);
}

TEST_CASE("generated corpora") {
  std::vector<Utterance> refs = {{"a", {"sì", "grazie"}}, {"b", {"buongiorno"}}};
  auto model = Model({{{"sì"}, {"she"}, 0.5}, {{"sì"}, {"c"}, 0.6},
                      {{"buongiorno"}, {"bonjour"}, 1.0}},
                     0.05);
  SynthConfig one;
  one.nbest_size = 1;
  auto single = GenerateCorpus({refs[0]}, model, one);
  REQUIRE(single.nbest.size() == 1);
  CHECK(single.nbest[0].entries.size() == 1);

  SynthConfig cfg;
  cfg.nbest_size = 25;
  auto out = GenerateCorpus(refs, model, cfg);
  auto again = GenerateCorpus(refs, model, cfg);
  CHECK(out.paired == again.paired);
  CHECK(out.nbest == again.nbest);
  REQUIRE(out.paired.size() == 2);
  for (size_t u = 0; u < refs.size(); ++u) {
    const auto &list = out.nbest[u];
    CHECK(list.id == refs[u].id);
    CHECK(out.paired[u].reference == refs[u].tokens);
    CHECK(out.paired[u].hypothesis == list.entries[0].tokens);
    std::set<Tokens> distinct;
    for (size_t k = 0; k < list.entries.size(); ++k) {
      CHECK(list.entries[k].rank == static_cast<int>(k + 1));
      CHECK(list.entries[k].score == doctest::Approx((k + 1) / 10.0));
      distinct.insert(list.entries[k].tokens);
    }
    CHECK(distinct.size() == list.entries.size());
    CHECK(list.entries.size() <= 25);
  }
  // A different seed changes the draws.
  auto other = GenerateCorpus(refs, Model(model.rules, 0.05, 7), cfg);
  CHECK_FALSE(other.nbest == out.nbest);

  CHECK_THROWS_AS(GenerateCorpus({}, model, cfg), InvalidArgument);
}

TEST_CASE("rule file parsing") {
  auto rules = ParseRules(testing::Lines("# comment\n\nsì\tshe\t0.5\n"
                                         "per favore\t<eps>\t1\n"),
                          "r.tsv");
  REQUIRE(rules.size() == 2);
  CHECK(rules[0].match == Tokens{"sì"});
  CHECK(rules[0].replacement == Tokens{"she"});
  CHECK(rules[0].probability == 0.5);
  CHECK(rules[1].replacement.empty());
  try {
    ParseRules(testing::Lines("a\tb\t0.5\na\tb\t1.5\n"), "r.tsv");
    FAIL("expected ParseError");
  } catch (const ParseError &e) {
    CHECK(std::string(e.what()).rfind("r.tsv:2:", 0) == 0);
  }
  CHECK_THROWS_AS(ParseRules({"a\tb"}, "r"), ParseError);
  CHECK_THROWS_AS(ParseRules({"a b c d\tx\t0.5"}, "r"), ParseError);
  CHECK_THROWS_AS(LoadRules("/nonexistent/rules.tsv"), ParseError);
}

TEST_CASE("reference composition") {
  std::vector<Tokens> phrases = {{"ciao"}, {"buona", "notte"}, {"sì"}};
  auto a = ComposeReferenceCorpus(phrases, 50, 9, "x");
  auto b = ComposeReferenceCorpus(phrases, 50, 9, "x");
  CHECK(a == b);
  REQUIRE(a.size() == 50);
  CHECK(a[3].id == "x3");
  for (const auto &u : a) {
    CHECK(u.tokens.size() >= 1);
    CHECK(u.tokens.size() <= 6);
  }
}

}  // namespace
}  // namespace t2t
