// pair_symbol.h
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
// PairSymbol: a joint token pairing a (possibly empty) run of hypothesis
// words with a (possibly empty) run of reference words. Text form is
// "src1|src2}tgt1", with "<eps>" for an empty side and '|', '}', '\'
// inside words escaped by '\'.

#ifndef T2T_PAIR_SYMBOL_H_
#define T2T_PAIR_SYMBOL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "t2t/corpus.h"

namespace t2t {

struct PairSymbol {
  Tokens source;
  Tokens target;

  bool empty() const { return source.empty() && target.empty(); }
  auto operator<=>(const PairSymbol &) const = default;
  bool operator==(const PairSymbol &) const = default;
};

std::string FormatPairSymbol(const PairSymbol &symbol);

// Throws ParseError on a missing or doubled '}' separator, a dangling escape,
// an empty word or an eps:eps symbol.
PairSymbol ParsePairSymbol(std::string_view text);

struct PairSymbolHash {
  size_t operator()(const PairSymbol &s) const;
};

// Dense interning of PairSymbols to ids 0..size-1 in insertion order.
class PairSymbolTable {
 public:
  int32_t Intern(const PairSymbol &symbol);
  // -1 when absent.
  int32_t Find(const PairSymbol &symbol) const;
  const PairSymbol &Symbol(int32_t id) const { return symbols_[id]; }
  size_t size() const { return symbols_.size(); }

 private:
  std::vector<PairSymbol> symbols_;
  std::unordered_map<PairSymbol, int32_t, PairSymbolHash> index_;
};

}  // namespace t2t

#endif  // T2T_PAIR_SYMBOL_H_
