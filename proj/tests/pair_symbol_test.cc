// pair_symbol_test.cc
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

#include "t2t/pair_symbol.h"

#include "doctest.h"
#include "t2t/error.h"

namespace t2t {
namespace {

TEST_CASE("pair symbol text form") {
  CHECK(FormatPairSymbol({{"bueno", "no", "te"}, {"buonanotte"}}) ==
        "bueno|no|te}buonanotte");
  CHECK(FormatPairSymbol({{}, {"la"}}) == "<eps>}la");
  CHECK(FormatPairSymbol({{"uh"}, {}}) == "uh}<eps>");
  CHECK(FormatPairSymbol({{"a|b"}, {"c}d\\"}}) == "a\\|b}c\\}d\\\\");
}

TEST_CASE("pair symbol parse inverts format") {
  const std::vector<PairSymbol> cases = {
      {{"bueno", "no", "te"}, {"buonanotte"}},
      {{}, {"la"}},
      {{"uh"}, {}},
      {{"a|b", "x"}, {"c}d\\"}},
  };
  for (const auto &s : cases) {
    CHECK(ParsePairSymbol(FormatPairSymbol(s)) == s);
  }
}

TEST_CASE("pair symbol parse errors") {
  CHECK_THROWS_AS(ParsePairSymbol("stop"), ParseError);
  CHECK_THROWS_AS(ParsePairSymbol("a}b}c"), ParseError);
  CHECK_THROWS_AS(ParsePairSymbol("<eps>}<eps>"), ParseError);
  CHECK_THROWS_AS(ParsePairSymbol("a||b}c"), ParseError);
  CHECK_THROWS_AS(ParsePairSymbol("a}b\\"), ParseError);
}

TEST_CASE("pair symbol table interns densely") {
  PairSymbolTable table;
  CHECK(table.Intern({{"a"}, {"b"}}) == 0);
  CHECK(table.Intern({{"c"}, {}}) == 1);
  CHECK(table.Intern({{"a"}, {"b"}}) == 0);
  CHECK(table.Find({{"c"}, {}}) == 1);
  CHECK(table.Find({{"z"}, {}}) == -1);
  CHECK(table.size() == 2);
  CHECK(table.Symbol(1) == PairSymbol{{"c"}, {}});
}

}  // namespace
}  // namespace t2t
