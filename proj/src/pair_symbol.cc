// pair_symbol.cc
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

#include "t2t/pair_symbol.h"

#include <functional>

#include "t2t/error.h"

namespace t2t {
namespace {

void AppendSide(const Tokens &words, std::string *out) {
  if (words.empty()) {
    out->append(kEpsilon);
    return;
  }
  for (size_t i = 0; i < words.size(); ++i) {
    if (i) out->push_back('|');
    for (char c : words[i]) {
      if (c == '|' || c == '}' || c == '\\') out->push_back('\\');
      out->push_back(c);
    }
  }
}

}  // namespace

std::string FormatPairSymbol(const PairSymbol &symbol) {
  std::string out;
  AppendSide(symbol.source, &out);
  out.push_back('}');
  AppendSide(symbol.target, &out);
  return out;
}

PairSymbol ParsePairSymbol(std::string_view text) {
  // Raw words per side, plus whether each side was exactly "<eps>" unescaped.
  std::vector<std::string> sides[2];
  bool side_escaped[2] = {false, false};
  int side = 0;
  std::string word;
  bool word_escaped = false;
  auto flush = [&]() {
    sides[side].push_back(word);
    side_escaped[side] = side_escaped[side] || word_escaped;
    word.clear();
    word_escaped = false;
  };
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\\') {
      if (i + 1 >= text.size()) {
        throw ParseError("dangling escape in pair symbol '" +
                         std::string(text) + "'");
      }
      word.push_back(text[++i]);
      word_escaped = true;
    } else if (c == '|') {
      flush();
    } else if (c == '}') {
      if (side == 1) {
        throw ParseError("extra '}' in pair symbol '" + std::string(text) + "'");
      }
      flush();
      side = 1;
    } else {
      word.push_back(c);
    }
  }
  if (side != 1) {
    throw ParseError("missing '}' in pair symbol '" + std::string(text) + "'");
  }
  flush();
  PairSymbol symbol;
  for (int s = 0; s < 2; ++s) {
    Tokens &dest = s == 0 ? symbol.source : symbol.target;
    if (sides[s].size() == 1 && sides[s][0] == kEpsilon && !side_escaped[s]) {
      continue;
    }
    for (auto &w : sides[s]) {
      if (w.empty()) {
        throw ParseError("empty word in pair symbol '" + std::string(text) +
                         "'");
      }
      dest.push_back(std::move(w));
    }
  }
  if (symbol.empty()) {
    throw ParseError("eps:eps pair symbol '" + std::string(text) + "'");
  }
  return symbol;
}

size_t PairSymbolHash::operator()(const PairSymbol &s) const {
  size_t h = 1469598103934665603ull;
  std::hash<std::string> hs;
  auto mix = [&h](size_t v) { h = (h ^ v) * 1099511628211ull; };
  for (const auto &w : s.source) mix(hs(w));
  mix(0x9e3779b97f4a7c15ull);
  for (const auto &w : s.target) mix(hs(w));
  return h;
}

int32_t PairSymbolTable::Intern(const PairSymbol &symbol) {
  auto [it, inserted] =
      index_.try_emplace(symbol, static_cast<int32_t>(symbols_.size()));
  if (inserted) symbols_.push_back(symbol);
  return it->second;
}

int32_t PairSymbolTable::Find(const PairSymbol &symbol) const {
  auto it = index_.find(symbol);
  return it == index_.end() ? -1 : it->second;
}

}  // namespace t2t
