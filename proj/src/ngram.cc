// ngram.cc
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

#include "t2t/ngram.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "t2t/error.h"
#include "t2t/text_util.h"

namespace t2t {
namespace {

constexpr double kLn10 = std::numbers::ln10;

std::string HeaderLine(int order) {
  return "\\t2tmap-jointlm order=" + std::to_string(order) + "\\";
}

}  // namespace

NGramVocabulary::NGramVocabulary() = default;

SymbolId NGramVocabulary::Intern(const PairSymbol &symbol) {
  if (symbol.empty()) throw InvalidArgument("eps:eps pair symbol");
  return pairs_.Intern(symbol) + 2;
}

SymbolId NGramVocabulary::Find(const PairSymbol &symbol) const {
  int32_t id = pairs_.Find(symbol);
  return id < 0 ? kOovId : id + 2;
}

SymbolId NGramVocabulary::InternText(const std::string &text) {
  if (text == kSentenceStart) return kBosId;
  if (text == kSentenceEnd) return kEosId;
  return Intern(ParsePairSymbol(text));
}

const PairSymbol &NGramVocabulary::Symbol(SymbolId id) const {
  if (id < 2) throw InvalidArgument("sentinel has no pair symbol");
  return pairs_.Symbol(id - 2);
}

std::string NGramVocabulary::Text(SymbolId id) const {
  if (id == kBosId) return std::string(kSentenceStart);
  if (id == kEosId) return std::string(kSentenceEnd);
  return FormatPairSymbol(Symbol(id));
}

NGramCounts CountNGrams(const std::vector<AlignedUtterance> &corpus,
                        int order) {
  if (order < 1 || order > kMaxOrder) {
    throw InvalidArgument("n-gram order must be in 1.." +
                          std::to_string(kMaxOrder));
  }
  NGramCounts counts;
  counts.order = order;
  counts.levels.resize(order);
  NGram ids;
  NGram gram;
  for (const auto &utt : corpus) {
    if (!(utt.weight > 0)) continue;
    ids.assign(order - 1, kBosId);
    for (const auto &s : utt.symbols) ids.push_back(counts.vocab.Intern(s));
    ids.push_back(kEosId);
    for (size_t pos = order - 1; pos < ids.size(); ++pos) {
      for (int k = 1; k <= order; ++k) {
        gram.assign(ids.begin() + (pos + 1 - k), ids.begin() + pos + 1);
        counts.levels[k - 1][gram] += utt.weight;
      }
    }
  }
  return counts;
}

double LevelDiscount::For(double count) const {
  const long long r = std::llround(count);
  if (r <= 1) return d1;
  if (r == 2) return d2;
  return d3plus;
}

int Discounts::fallback_levels() const {
  return static_cast<int>(std::count_if(levels.begin(), levels.end(),
                                        [](const auto &l) { return l.fallback; }));
}

LevelDiscount DiscountsFromCountOfCounts(double n1, double n2, double n3,
                                         double n4) {
  if (n1 <= 0 || n2 <= 0 || n3 <= 0 || n4 <= 0) {
    return LevelDiscount{0.5, 0.5, 0.5, true};
  }
  const double y = n1 / (n1 + 2 * n2);
  LevelDiscount d;
  d.d1 = std::clamp(1 - 2 * y * n2 / n1, 0.0, 0.99 * 1);
  d.d2 = std::clamp(2 - 3 * y * n3 / n2, 0.0, 0.99 * 2);
  d.d3plus = std::clamp(3 - 4 * y * n4 / n3, 0.0, 0.99 * 3);
  return d;
}

std::vector<std::map<NGram, double>> AdjustedCounts(const NGramCounts &counts) {
  const int order = counts.order;
  std::vector<std::map<NGram, double>> adjusted(order);
  if (order == 0) return adjusted;
  adjusted[order - 1] = counts.levels[order - 1];
  for (int k = 1; k < order; ++k) {
    auto &level = adjusted[k - 1];
    for (const auto &[gram, count] : counts.levels[k - 1]) {
      if (gram.front() == kBosId) level.emplace(gram, count);
    }
    for (const auto &[gram, count] : counts.levels[k]) {
      if (gram[1] == kBosId) continue;
      level[NGram(gram.begin() + 1, gram.end())] += 1.0;
    }
  }
  return adjusted;
}

Discounts EstimateDiscounts(const NGramCounts &counts) {
  Discounts discounts;
  for (const auto &level : AdjustedCounts(counts)) {
    double n[5] = {0, 0, 0, 0, 0};
    for (const auto &[gram, count] : level) {
      const long long r = std::llround(count);
      if (r >= 1 && r <= 4) n[r] += 1;
    }
    discounts.levels.push_back(DiscountsFromCountOfCounts(n[1], n[2], n[3], n[4]));
  }
  return discounts;
}

JointNGramModel EstimateModifiedKneserNey(const NGramCounts &counts,
                                          const Discounts &discounts) {
  const int order = counts.order;
  if (order < 1) throw EstimationError("n-gram order must be positive");
  if (static_cast<int>(discounts.levels.size()) != order) {
    throw EstimationError("discounts do not match the model order");
  }
  if (counts.levels[0].empty()) throw EstimationError("no n-gram counts");
  const auto adjusted = AdjustedCounts(counts);
  const double uniform =
      1.0 / static_cast<double>(counts.vocab.num_predictable());

  JointNGramModel model;
  model.order_ = order;
  model.vocab_ = counts.vocab;
  model.probs_.resize(order);
  // Linear probabilities of the previous level, looked up for interpolation.
  std::map<NGram, double> lower, current;
  NGram suffix;

  for (int k = 1; k <= order; ++k) {
    const auto &level = adjusted[k - 1];
    const LevelDiscount &disc = discounts.levels[k - 1];
    current.clear();
    // Entries sharing a context are adjacent in the sorted map.
    for (auto group = level.begin(); group != level.end();) {
      auto end = group;
      double total = 0.0, removed = 0.0;
      while (end != level.end() &&
             std::equal(group->first.begin(), group->first.end() - 1,
                        end->first.begin())) {
        const double c = end->second;
        total += c;
        removed += std::min(disc.For(c), c);
        ++end;
      }
      if (!(total > 0)) throw EstimationError("non-positive context total");
      const double gamma = removed / total;
      for (auto it = group; it != end; ++it) {
        const double c = it->second;
        const double alpha = std::max(c - disc.For(c), 0.0) / total;
        double lower_prob = uniform;
        if (k > 1) {
          suffix.assign(it->first.begin() + 1, it->first.end());
          auto found = lower.find(suffix);
          if (found == lower.end()) {
            throw EstimationError("missing lower-order n-gram");
          }
          lower_prob = found->second;
        }
        const double p = alpha + gamma * lower_prob;
        double lp = std::log10(p);
        if (!(lp <= 1e-12)) {
          throw EstimationError("probability above 1 for " +
                                model.vocab_.Text(it->first.back()));
        }
        lp = std::min(lp, 0.0);
        if (!std::isfinite(lp)) lp = kNoProbLog10;
        current.emplace(it->first, p);
        model.probs_[k - 1].emplace(it->first, lp);
      }
      if (k > 1) {
        NGram context(group->first.begin(), group->first.end() - 1);
        const double bow = gamma > 0 ? std::log10(gamma) : kNoProbLog10;
        model.backoffs_.emplace(std::move(context), bow);
      }
      group = end;
    }
    lower.swap(current);
  }
  return model;
}

double JointNGramModel::LogProb(const NGram &context, SymbolId symbol) const {
  if (symbol <= kBosId || static_cast<size_t>(symbol) >= vocab_.size()) {
    return kOovLogProb;
  }
  const size_t n = std::min<size_t>(context.size(), order_ - 1);
  double acc = 0.0;
  NGram gram;
  for (size_t k = n + 1; k-- > 0;) {
    gram.assign(context.end() - static_cast<std::ptrdiff_t>(k), context.end());
    gram.push_back(symbol);
    auto it = probs_[k].find(gram);
    if (it != probs_[k].end()) return (acc + it->second) * kLn10;
    if (k > 0) {
      gram.pop_back();
      auto bo = backoffs_.find(gram);
      if (bo != backoffs_.end()) acc += bo->second;
    }
  }
  return kOovLogProb;
}

double JointNGramModel::ContextMass(const NGram &context) const {
  double mass = std::exp(LogProb(context, kEosId));
  for (SymbolId w = 2; static_cast<size_t>(w) < vocab_.size(); ++w) {
    mass += std::exp(LogProb(context, w));
  }
  return mass;
}

double SequenceLogProb(const JointNGramModel &model,
                       const std::vector<PairSymbol> &symbols) {
  NGram context(model.order() - 1, kBosId);
  double total = 0.0;
  for (const auto &s : symbols) {
    const SymbolId id = model.vocab().Find(s);
    total += model.LogProb(context, id);
    context.push_back(id);
  }
  total += model.LogProb(context, kEosId);
  return total;
}

double Perplexity(const JointNGramModel &model,
                  const std::vector<AlignedUtterance> &corpus) {
  double logprob = 0.0, events = 0.0;
  for (const auto &utt : corpus) {
    logprob += utt.weight * SequenceLogProb(model, utt.symbols);
    events += utt.weight * static_cast<double>(utt.symbols.size() + 1);
  }
  if (!(events > 0)) throw InvalidArgument("perplexity of an empty corpus");
  return std::exp(-logprob / events);
}

std::string FormatJointNGramModel(const JointNGramModel &model) {
  std::string out = HeaderLine(model.order()) + '\n';
  const auto &backoffs = model.Backoffs();
  for (int k = 1; k <= model.order(); ++k) {
    out += "\\" + std::to_string(k) + "-grams:\n";
    std::map<NGram, std::pair<double, const double *>> rows;
    for (const auto &[gram, lp] : model.Level(k)) rows[gram].first = lp;
    for (const auto &[context, bow] : backoffs) {
      if (static_cast<int>(context.size()) != k) continue;
      auto [it, inserted] = rows.try_emplace(context);
      if (inserted) it->second.first = kNoProbLog10;
      it->second.second = &bow;
    }
    for (const auto &[gram, row] : rows) {
      out += FormatPrecise(row.first);
      out += '\t';
      for (size_t i = 0; i < gram.size(); ++i) {
        if (i) out += ' ';
        out += model.vocab().Text(gram[i]);
      }
      if (row.second) {
        out += '\t';
        out += FormatPrecise(*row.second);
      }
      out += '\n';
    }
  }
  out += "\\end\\\n";
  return out;
}

JointNGramModel ParseJointNGramModel(const std::vector<std::string> &lines,
                                     const std::string &source) {
  if (lines.empty()) throw ParseError(source, 1, "empty model file");
  const std::string prefix = "\\t2tmap-jointlm order=";
  const std::string &head = lines[0];
  long long order = 0;
  if (head.rfind(prefix, 0) != 0 || head.size() < prefix.size() + 2 ||
      head.back() != '\\' ||
      !ParseInt(std::string_view(head).substr(
                    prefix.size(), head.size() - prefix.size() - 1),
                &order) ||
      order < 1 || order > kMaxOrder) {
    throw ParseError(source, 1, "bad model header");
  }
  JointNGramModel model;
  model.order_ = static_cast<int>(order);
  model.probs_.resize(order);
  int level = 0;
  bool ended = false;
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::string &line = lines[i];
    const size_t line_no = i + 1;
    if (ended) {
      if (!line.empty()) throw ParseError(source, line_no, "text after \\end\\");
      continue;
    }
    if (line == "\\end\\") {
      ended = true;
      continue;
    }
    if (!line.empty() && line[0] == '\\') {
      const std::string expected = "\\" + std::to_string(level + 1) + "-grams:";
      if (line != expected || level >= order) {
        throw ParseError(source, line_no, "unexpected section '" + line + "'");
      }
      ++level;
      continue;
    }
    if (level == 0) throw ParseError(source, line_no, "entry outside a section");
    auto fields = SplitFields(line);
    double lp = 0, bow = 0;
    if ((fields.size() != 2 && fields.size() != 3) ||
        !ParseDouble(fields[0], &lp) ||
        (fields.size() == 3 && !ParseDouble(fields[2], &bow))) {
      throw ParseError(source, line_no, "malformed n-gram entry");
    }
    if (!(lp <= 0) || !std::isfinite(lp) || !std::isfinite(bow)) {
      throw ParseError(source, line_no, "log-probability must be finite and <= 0");
    }
    auto texts = SplitFields(fields[1], ' ');
    if (static_cast<int>(texts.size()) != level) {
      throw ParseError(source, line_no,
                       "expected " + std::to_string(level) + " symbols");
    }
    NGram gram;
    try {
      for (const auto &t : texts) gram.push_back(model.vocab_.InternText(t));
    } catch (const Error &e) {
      throw ParseError(source, line_no, e.what());
    }
    if (gram.back() == kBosId) {
      if (fields.size() != 3) {
        throw ParseError(source, line_no, "context-only entry needs a backoff");
      }
    } else {
      model.probs_[level - 1][gram] = lp;
    }
    if (fields.size() == 3) {
      if (level == order) {
        throw ParseError(source, line_no, "backoff on a top-order n-gram");
      }
      model.backoffs_[gram] = bow;
    }
  }
  if (!ended) throw ParseError(source, lines.size(), "missing \\end\\");
  if (model.probs_[0].empty()) throw ParseError(source, 1, "no unigrams");
  return model;
}

JointNGramModel LoadJointNGramModel(const std::string &path) {
  return ParseJointNGramModel(ReadLines(path), path);
}

void WriteJointNGramModel(const std::string &path,
                          const JointNGramModel &model) {
  WriteTextFile(path, FormatJointNGramModel(model));
}

}  // namespace t2t
