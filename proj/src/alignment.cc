// alignment.cc
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

#include "t2t/alignment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>

#include "t2t/error.h"
#include "t2t/text_util.h"

namespace t2t {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Pairs per E-step block. Blocks are reduced in index order, so the model is
// bitwise independent of the worker count.
constexpr size_t kBlockSize = 64;

double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

Tokens Slice(const Tokens &words, int begin, int len) {
  return Tokens(words.begin() + begin, words.begin() + begin + len);
}

}  // namespace

void AlignmentConfig::Validate() const {
  if (max_x < 1 || max_y < 1) {
    throw InvalidArgument("max_x and max_y must be positive");
  }
  if (max_x > 255 || max_y > 255) {
    throw InvalidArgument("max_x and max_y must be at most 255");
  }
  if (max_iterations < 1) {
    throw InvalidArgument("max_iterations must be positive");
  }
  if (!(convergence_epsilon > 0)) {
    throw InvalidArgument("convergence_epsilon must be positive");
  }
  if (num_threads < 1) throw InvalidArgument("num_threads must be positive");
}

PairSymbol AlignmentLattice::SymbolOf(const LatticeEdge &edge,
                                      const UtterancePair &pair) const {
  return PairSymbol{Slice(pair.hypothesis, HypPos(edge.from), edge.source_len),
                    Slice(pair.reference, RefPos(edge.from), edge.target_len)};
}

AlignmentLattice BuildLattice(const UtterancePair &pair,
                              const AlignmentConfig &config) {
  config.Validate();
  const size_t hyp_len = pair.hypothesis.size();
  const size_t ref_len = pair.reference.size();
  if (hyp_len > 10 * static_cast<size_t>(config.max_x) * ref_len) {
    throw AlignmentError("pair '" + pair.id + "': hypothesis length " +
                         std::to_string(hyp_len) +
                         " too long for reference length " +
                         std::to_string(ref_len));
  }
  AlignmentLattice lattice;
  lattice.hyp_len = static_cast<int>(hyp_len);
  lattice.ref_len = static_cast<int>(ref_len);
  std::vector<LatticeEdge> all;
  for (int i = 0; i <= lattice.hyp_len; ++i) {
    for (int j = 0; j <= lattice.ref_len; ++j) {
      for (int a = 0; a <= config.max_x && i + a <= lattice.hyp_len; ++a) {
        if (a == 0 && !config.allow_target_insertion) continue;
        for (int b = 0; b <= config.max_y && j + b <= lattice.ref_len; ++b) {
          if (a == 0 && b == 0) continue;
          if (b == 0 && !config.allow_source_deletion) continue;
          all.push_back(LatticeEdge{lattice.NodeId(i, j),
                                    lattice.NodeId(i + a, j + b),
                                    static_cast<uint8_t>(a),
                                    static_cast<uint8_t>(b)});
        }
      }
    }
  }
  const int n = lattice.num_nodes();
  std::vector<char> reach(n, 0), coreach(n, 0);
  reach[0] = 1;
  for (const auto &e : all) {
    if (reach[e.from]) reach[e.to] = 1;
  }
  coreach[lattice.final_node()] = 1;
  for (auto it = all.rbegin(); it != all.rend(); ++it) {
    if (coreach[it->to]) coreach[it->from] = 1;
  }
  if (!reach[lattice.final_node()]) {
    throw AlignmentError("pair '" + pair.id + "' is unalignable");
  }
  for (const auto &e : all) {
    if (reach[e.from] && coreach[e.to]) lattice.edges.push_back(e);
  }
  return lattice;
}

ForwardBackward RunForwardBackward(const AlignmentLattice &lattice,
                                   const std::vector<double> &edge_logprob) {
  ForwardBackward fb;
  const int n = lattice.num_nodes();
  fb.alpha.assign(n, kNegInf);
  fb.beta.assign(n, kNegInf);
  fb.alpha[0] = 0.0;
  for (size_t e = 0; e < lattice.edges.size(); ++e) {
    const auto &edge = lattice.edges[e];
    fb.alpha[edge.to] =
        LogAdd(fb.alpha[edge.to], fb.alpha[edge.from] + edge_logprob[e]);
  }
  fb.beta[lattice.final_node()] = 0.0;
  for (size_t e = lattice.edges.size(); e-- > 0;) {
    const auto &edge = lattice.edges[e];
    fb.beta[edge.from] =
        LogAdd(fb.beta[edge.from], fb.beta[edge.to] + edge_logprob[e]);
  }
  fb.log_total = fb.alpha[lattice.final_node()];
  return fb;
}

std::vector<double> EdgePosteriors(const AlignmentLattice &lattice,
                                   const std::vector<double> &edge_logprob,
                                   const ForwardBackward &fb) {
  std::vector<double> post(lattice.edges.size(), 0.0);
  if (fb.log_total == kNegInf) return post;
  for (size_t e = 0; e < lattice.edges.size(); ++e) {
    const auto &edge = lattice.edges[e];
    post[e] = std::exp(fb.alpha[edge.from] + edge_logprob[e] +
                       fb.beta[edge.to] - fb.log_total);
  }
  return post;
}

AlignmentModel AlignmentModel::FromProbabilities(
    std::vector<std::pair<PairSymbol, double>> probabilities) {
  std::erase_if(probabilities, [](const auto &p) { return !(p.second > 0); });
  std::sort(probabilities.begin(), probabilities.end());
  double total = 0.0;
  AlignmentModel model;
  for (auto &[symbol, prob] : probabilities) {
    if (prob > 1.0) throw InvalidArgument("probability above 1");
    if (symbol.empty()) throw InvalidArgument("eps:eps symbol in model");
    const size_t before = model.table_.size();
    model.table_.Intern(symbol);
    if (model.table_.size() == before) {
      throw InvalidArgument("duplicate symbol " + FormatPairSymbol(symbol));
    }
    model.probs_.push_back(prob);
    total += prob;
  }
  if (!probabilities.empty() && std::abs(total - 1.0) > 1e-9) {
    throw InvalidArgument("alignment probabilities sum to " +
                          FormatPrecise(total));
  }
  return model;
}

double AlignmentModel::Probability(const PairSymbol &symbol) const {
  int32_t id = table_.Find(symbol);
  return id < 0 ? 0.0 : probs_[id];
}

double AlignmentModel::ScoreForDecoding(const PairSymbol &symbol) const {
  int32_t id = table_.Find(symbol);
  return std::log(id < 0 ? kUnseenSymbolProbability : probs_[id]);
}

std::string FormatAlignmentModel(const AlignmentModel &model) {
  std::string out;
  for (size_t i = 0; i < model.size(); ++i) {
    out += FormatPairSymbol(model.Symbol(i)) + '\t' +
           FormatPrecise(model.ProbabilityAt(i)) + '\n';
  }
  return out;
}

AlignmentModel ParseAlignmentModel(const std::vector<std::string> &lines,
                                   const std::string &source) {
  std::vector<std::pair<PairSymbol, double>> probs;
  for (size_t i = 0; i < lines.size(); ++i) {
    auto fields = SplitFields(lines[i]);
    double p = 0;
    if (fields.size() != 2 || !ParseDouble(fields[1], &p) || !(p > 0)) {
      throw ParseError(source, i + 1, "expected 'symbol<TAB>probability'");
    }
    try {
      probs.emplace_back(ParsePairSymbol(fields[0]), p);
    } catch (const ParseError &e) {
      throw ParseError(source, i + 1, e.what());
    }
  }
  try {
    return AlignmentModel::FromProbabilities(std::move(probs));
  } catch (const InvalidArgument &e) {
    throw ParseError(source + ": " + e.what());
  }
}

AlignmentModel TrainAlignmentModel(const std::vector<UtterancePair> &corpus,
                                   const AlignmentConfig &config,
                                   EmTrace *trace) {
  config.Validate();
  EmTrace local_trace;
  EmTrace &tr = trace ? *trace : local_trace;
  tr = EmTrace{};
  if (corpus.empty()) throw AlignmentError("empty alignment corpus");

  // Identical (hypothesis, reference) pairs share one lattice; their weights
  // add up.
  struct Unique {
    const UtterancePair *pair;
    double weight;
    size_t count;
  };
  std::vector<Unique> uniques;
  {
    std::unordered_map<std::string, size_t> index;
    for (const auto &p : corpus) {
      std::string key = Join(p.hypothesis, "\x1f") + "\x1e" +
                        Join(p.reference, "\x1f");
      auto [it, inserted] = index.try_emplace(key, uniques.size());
      if (inserted) {
        uniques.push_back(Unique{&p, p.weight, 1});
      } else {
        uniques[it->second].weight += p.weight;
        uniques[it->second].count += 1;
      }
    }
  }

  std::unordered_map<std::string, int32_t> token_ids;
  auto token_id = [&token_ids](const Token &t) {
    return token_ids.try_emplace(t, static_cast<int32_t>(token_ids.size()))
        .first->second;
  };
  std::unordered_map<std::string, int32_t> symbol_ids;
  std::vector<PairSymbol> symbols;

  struct Item {
    AlignmentLattice lattice;
    std::vector<int32_t> edge_symbol;
    double weight;
  };
  std::vector<Item> items;
  for (const auto &u : uniques) {
    Item item;
    try {
      item.lattice = BuildLattice(*u.pair, config);
    } catch (const AlignmentError &) {
      tr.unalignable_pairs += u.count;
      continue;
    }
    item.weight = u.weight;
    std::vector<int32_t> hyp_ids, ref_ids;
    for (const auto &t : u.pair->hypothesis) hyp_ids.push_back(token_id(t));
    for (const auto &t : u.pair->reference) ref_ids.push_back(token_id(t));
    item.edge_symbol.reserve(item.lattice.edges.size());
    std::string key;
    for (const auto &edge : item.lattice.edges) {
      const int i = item.lattice.HypPos(edge.from);
      const int j = item.lattice.RefPos(edge.from);
      key.clear();
      key.push_back(static_cast<char>(edge.source_len));
      key.push_back(static_cast<char>(edge.target_len));
      auto put = [&key](int32_t v) {
        key.append(reinterpret_cast<const char *>(&v), sizeof(v));
      };
      for (int a = 0; a < edge.source_len; ++a) put(hyp_ids[i + a]);
      for (int b = 0; b < edge.target_len; ++b) put(ref_ids[j + b]);
      auto [it, inserted] =
          symbol_ids.try_emplace(key, static_cast<int32_t>(symbols.size()));
      if (inserted) symbols.push_back(item.lattice.SymbolOf(edge, *u.pair));
      item.edge_symbol.push_back(it->second);
    }
    items.push_back(std::move(item));
  }
  tr.unique_pairs = uniques.size();
  tr.num_symbols = symbols.size();
  if (items.empty()) throw AlignmentError("no alignable pairs in corpus");

  const size_t num_symbols = symbols.size();
  std::vector<double> probs(num_symbols, 1.0 / num_symbols);
  const size_t num_blocks = (items.size() + kBlockSize - 1) / kBlockSize;

  struct BlockResult {
    std::vector<std::pair<int32_t, double>> counts;  // ascending symbol id
    double log_likelihood = 0.0;
  };

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    std::vector<double> logp(num_symbols);
    for (size_t s = 0; s < num_symbols; ++s) {
      logp[s] = probs[s] > 0 ? std::log(probs[s]) : kNegInf;
    }
    std::vector<BlockResult> blocks(num_blocks);
    auto run_block = [&](size_t b, std::vector<double> &scratch,
                         std::vector<int32_t> &touched) {
      BlockResult &res = blocks[b];
      const size_t end = std::min(items.size(), (b + 1) * kBlockSize);
      std::vector<double> edge_logprob;
      for (size_t k = b * kBlockSize; k < end; ++k) {
        const Item &item = items[k];
        edge_logprob.resize(item.edge_symbol.size());
        for (size_t e = 0; e < edge_logprob.size(); ++e) {
          edge_logprob[e] = logp[item.edge_symbol[e]];
        }
        ForwardBackward fb = RunForwardBackward(item.lattice, edge_logprob);
        res.log_likelihood += item.weight * fb.log_total;
        if (fb.log_total == kNegInf) continue;
        auto post = EdgePosteriors(item.lattice, edge_logprob, fb);
        for (size_t e = 0; e < post.size(); ++e) {
          const int32_t s = item.edge_symbol[e];
          if (scratch[s] == 0.0) touched.push_back(s);
          scratch[s] += item.weight * post[e];
        }
      }
      std::sort(touched.begin(), touched.end());
      touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
      for (int32_t s : touched) {
        if (scratch[s] != 0.0) res.counts.emplace_back(s, scratch[s]);
        scratch[s] = 0.0;
      }
      touched.clear();
    };
    const int workers = std::max(
        1, std::min<int>(config.num_threads, static_cast<int>(num_blocks)));
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      std::vector<double> scratch(num_symbols, 0.0);
      std::vector<int32_t> touched;
      for (size_t b = next++; b < num_blocks; b = next++) {
        run_block(b, scratch, touched);
      }
    };
    if (workers == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (auto &t : pool) t.join();
    }

    double ll = 0.0;
    std::vector<double> counts(num_symbols, 0.0);
    for (const auto &block : blocks) {
      ll += block.log_likelihood;
      for (const auto &[s, c] : block.counts) counts[s] += c;
    }
    if (std::isnan(ll)) throw AlignmentError("EM log-likelihood is NaN");
    if (!tr.log_likelihoods.empty()) {
      const double prev = tr.log_likelihoods.back();
      tr.log_likelihoods.push_back(ll);
      if (ll - prev < config.convergence_epsilon * std::abs(prev)) {
        tr.converged = true;
        break;
      }
    } else {
      tr.log_likelihoods.push_back(ll);
    }

    double total = 0.0;
    for (double c : counts) total += c;
    if (!(total > 0)) throw AlignmentError("EM produced no expected counts");
    for (size_t s = 0; s < num_symbols; ++s) probs[s] = counts[s] / total;
  }

  std::vector<std::pair<PairSymbol, double>> result;
  result.reserve(num_symbols);
  for (size_t s = 0; s < num_symbols; ++s) {
    if (probs[s] > 0) result.emplace_back(symbols[s], probs[s]);
  }
  return AlignmentModel::FromProbabilities(std::move(result));
}

AlignedUtterance ViterbiAlign(const UtterancePair &pair,
                              const AlignmentModel &model,
                              const AlignmentConfig &config) {
  AlignmentLattice lattice = BuildLattice(pair, config);
  const int n = lattice.num_nodes();
  std::vector<double> best(n, kNegInf);
  std::vector<int> length(n, 0);
  std::vector<int32_t> back(n, -1);
  best[0] = 0.0;

  std::vector<PairSymbol> edge_symbol;
  edge_symbol.reserve(lattice.edges.size());
  for (const auto &e : lattice.edges) {
    edge_symbol.push_back(lattice.SymbolOf(e, pair));
  }
  auto prefix = [&](int32_t node, int32_t last_edge) {
    std::vector<const PairSymbol *> path;
    if (last_edge >= 0) path.push_back(&edge_symbol[last_edge]);
    for (int32_t v = node; back[v] >= 0; v = lattice.edges[back[v]].from) {
      path.push_back(&edge_symbol[back[v]]);
    }
    std::reverse(path.begin(), path.end());
    return path;
  };

  for (size_t e = 0; e < lattice.edges.size(); ++e) {
    const auto &edge = lattice.edges[e];
    const double score = best[edge.from] + model.ScoreForDecoding(edge_symbol[e]);
    const int len = length[edge.from] + 1;
    bool take = false;
    if (back[edge.to] < 0 || score > best[edge.to]) {
      take = true;
    } else if (score == best[edge.to]) {
      if (len < length[edge.to]) {
        take = true;
      } else if (len == length[edge.to]) {
        auto candidate = prefix(edge.from, static_cast<int32_t>(e));
        auto incumbent = prefix(edge.to, -1);
        take = std::lexicographical_compare(
            candidate.begin(), candidate.end(), incumbent.begin(),
            incumbent.end(),
            [](const PairSymbol *a, const PairSymbol *b) { return *a < *b; });
      }
    }
    if (take) {
      best[edge.to] = score;
      length[edge.to] = len;
      back[edge.to] = static_cast<int32_t>(e);
    }
  }

  AlignedUtterance out;
  out.id = pair.id;
  out.weight = pair.weight;
  for (const PairSymbol *s : prefix(lattice.final_node(), -1)) {
    out.symbols.push_back(*s);
  }
  return out;
}

std::vector<AlignedUtterance> AlignCorpus(
    const std::vector<UtterancePair> &corpus, const AlignmentModel &model,
    const AlignmentConfig &config, size_t *skipped) {
  std::vector<AlignedUtterance> out;
  size_t skip = 0;
  for (const auto &pair : corpus) {
    try {
      out.push_back(ViterbiAlign(pair, model, config));
    } catch (const AlignmentError &) {
      ++skip;
    }
  }
  if (skipped) *skipped = skip;
  return out;
}

std::string FormatAlignedCorpus(const std::vector<AlignedUtterance> &corpus) {
  std::string out;
  for (const auto &utt : corpus) {
    out += utt.id + '\t' + FormatShortest(utt.weight) + '\t';
    for (size_t i = 0; i < utt.symbols.size(); ++i) {
      if (i) out += ' ';
      out += FormatPairSymbol(utt.symbols[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<AlignedUtterance> ParseAlignedCorpus(
    const std::vector<std::string> &lines, const std::string &source) {
  std::vector<AlignedUtterance> corpus;
  for (size_t i = 0; i < lines.size(); ++i) {
    auto fields = SplitFields(lines[i]);
    if (fields.size() != 3) {
      throw ParseError(source, i + 1, "expected 3 tab-separated columns");
    }
    AlignedUtterance utt;
    utt.id = fields[0];
    if (utt.id.empty()) throw ParseError(source, i + 1, "empty id");
    if (!ParseDouble(fields[1], &utt.weight) || !(utt.weight >= 0) ||
        std::isinf(utt.weight)) {
      throw ParseError(source, i + 1, "bad weight '" + fields[1] + "'");
    }
    for (const auto &text : SplitFields(fields[2], ' ')) {
      try {
        utt.symbols.push_back(ParsePairSymbol(text));
      } catch (const ParseError &e) {
        throw ParseError(source, i + 1, e.what());
      }
    }
    corpus.push_back(std::move(utt));
  }
  return corpus;
}

std::vector<AlignedUtterance> LoadAlignedCorpus(const std::string &path) {
  return ParseAlignedCorpus(ReadLines(path), path);
}

void WriteAlignedCorpus(const std::string &path,
                        const std::vector<AlignedUtterance> &corpus) {
  WriteTextFile(path, FormatAlignedCorpus(corpus));
}

}  // namespace t2t
