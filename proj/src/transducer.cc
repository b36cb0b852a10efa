// transducer.cc
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

#include "t2t/transducer.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <queue>
#include <thread>
#include <unordered_map>
#include <utility>

#include "t2t/text_util.h"

namespace t2t {
namespace {

constexpr std::string_view kMagic = "T2TFST1";

}  // namespace

LabelTable::LabelTable() {
  Intern(std::string(kEpsilon));
  Intern(std::string(kUnknown));
}

Label LabelTable::Intern(const std::string &word) {
  auto [it, inserted] =
      index_.try_emplace(word, static_cast<Label>(words_.size()));
  if (inserted) words_.push_back(word);
  return it->second;
}

Label LabelTable::Find(const std::string &word) const {
  auto it = index_.find(word);
  return it == index_.end() ? -1 : it->second;
}

StateId MappingTransducer::AddState() {
  arcs_.emplace_back();
  finals_.push_back(kInfCost);
  return static_cast<StateId>(arcs_.size() - 1);
}

void MappingTransducer::AddArc(StateId state, const Arc &arc) {
  auto &arcs = arcs_[state];
  if (!arcs.empty() && arcs.back().ilabel > arc.ilabel) input_sorted_ = false;
  arcs.push_back(arc);
}

void MappingTransducer::ArcSortInput() {
  for (auto &arcs : arcs_) {
    std::stable_sort(arcs.begin(), arcs.end(), [](const Arc &a, const Arc &b) {
      return a.ilabel < b.ilabel;
    });
  }
  input_sorted_ = true;
}

size_t MappingTransducer::num_arcs() const {
  size_t n = 0;
  for (const auto &a : arcs_) n += a.size();
  return n;
}

void MappingTransducer::Trim() {
  const size_t n = arcs_.size();
  std::vector<char> reach(n, 0), coreach(n, 0);
  std::vector<std::vector<StateId>> reverse(n);
  for (size_t s = 0; s < n; ++s) {
    for (const auto &arc : arcs_[s]) {
      reverse[arc.next].push_back(static_cast<StateId>(s));
    }
  }
  std::vector<StateId> stack;
  if (start_ >= 0 && static_cast<size_t>(start_) < n) {
    reach[start_] = 1;
    stack.push_back(start_);
  }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (const auto &arc : arcs_[s]) {
      if (!reach[arc.next]) {
        reach[arc.next] = 1;
        stack.push_back(arc.next);
      }
    }
  }
  for (size_t s = 0; s < n; ++s) {
    if (finals_[s] != kInfCost) {
      coreach[s] = 1;
      stack.push_back(static_cast<StateId>(s));
    }
  }
  while (!stack.empty()) {
    StateId s = stack.back();
    stack.pop_back();
    for (StateId p : reverse[s]) {
      if (!coreach[p]) {
        coreach[p] = 1;
        stack.push_back(p);
      }
    }
  }
  std::vector<StateId> remap(n, -1);
  StateId next_id = 0;
  for (size_t s = 0; s < n; ++s) {
    if (reach[s] && coreach[s]) remap[s] = next_id++;
  }
  std::vector<std::vector<Arc>> arcs(next_id);
  std::vector<double> finals(next_id, kInfCost);
  for (size_t s = 0; s < n; ++s) {
    if (remap[s] < 0) continue;
    finals[remap[s]] = finals_[s];
    for (const auto &arc : arcs_[s]) {
      if (remap[arc.next] < 0) continue;
      Arc copy = arc;
      copy.next = remap[arc.next];
      arcs[remap[s]].push_back(copy);
    }
  }
  arcs_ = std::move(arcs);
  finals_ = std::move(finals);
  start_ = (start_ >= 0 && static_cast<size_t>(start_) < n) ? remap[start_] : -1;
}

void DecodeConfig::Validate() const {
  if (nbest < 1) throw InvalidArgument("nbest must be positive");
  if (output_top_k < 1) throw InvalidArgument("output_top_k must be positive");
  if (output_top_k > nbest) {
    throw InvalidArgument("output_top_k must not exceed nbest");
  }
  if (!(beam > 0)) throw InvalidArgument("beam must be positive");
  if (!(passthrough_penalty >= 0) || std::isinf(passthrough_penalty)) {
    throw InvalidArgument("passthrough_penalty must be finite and >= 0");
  }
}

MappingTransducer BuildTransducer(const JointNGramModel &model,
                                  const DecodeConfig &config) {
  config.Validate();
  const int order = model.order();
  const auto &vocab = model.vocab();
  MappingTransducer fst;
  fst.set_model_order(order);

  std::map<NGram, StateId> context_state;
  context_state.emplace(NGram{}, fst.AddState());
  for (const auto &[context, bow] : model.Backoffs()) {
    if (bow > 0) {
      throw TransducerError("positive backoff weight in model");
    }
    context_state.emplace(context, fst.AddState());
  }
  auto state_for = [&](NGram seq) {
    if (static_cast<int>(seq.size()) > order - 1) {
      seq.erase(seq.begin(), seq.end() - (order - 1));
    }
    while (true) {
      auto it = context_state.find(seq);
      if (it != context_state.end()) return it->second;
      seq.erase(seq.begin());
    }
  };
  fst.SetStart(state_for(NGram(order - 1, kBosId)));

  for (int k = 1; k <= order; ++k) {
    for (const auto &[gram, lp] : model.Level(k)) {
      if (lp > 0) throw TransducerError("positive log-probability in model");
      const SymbolId w = gram.back();
      if (w == kEosId) continue;
      auto from = context_state.find(NGram(gram.begin(), gram.end() - 1));
      if (from == context_state.end()) continue;
      const StateId dest = state_for(gram);
      const PairSymbol &symbol = vocab.Symbol(w);
      const size_t len =
          std::max({symbol.source.size(), symbol.target.size(), size_t{1}});
      const double cost = -lp * std::numbers::ln10;
      StateId prev = from->second;
      for (size_t i = 0; i < len; ++i) {
        Arc arc;
        arc.ilabel = i < symbol.source.size()
                         ? fst.input_labels().Intern(symbol.source[i])
                         : kEpsLabel;
        arc.olabel = i < symbol.target.size()
                         ? fst.output_labels().Intern(symbol.target[i])
                         : kEpsLabel;
        arc.cost = i == 0 ? cost : 0.0;
        arc.next = i + 1 == len ? dest : fst.AddState();
        fst.AddArc(prev, arc);
        prev = arc.next;
      }
    }
  }
  for (const auto &[context, state] : context_state) {
    fst.SetFinal(state, -model.LogProb(context, kEosId));
    if (context.empty()) continue;
    const double bow = model.Backoffs().at(context);
    fst.AddArc(state, Arc{kEpsLabel, kEpsLabel, -bow * std::numbers::ln10,
                          state_for(NGram(context.begin() + 1, context.end()))});
  }
  if (config.passthrough) {
    const StateId unigram = context_state.at(NGram{});
    for (const auto &[context, state] : context_state) {
      fst.AddArc(state,
                 Arc{kCopyLabel, kCopyLabel, config.passthrough_penalty, unigram});
    }
    // Known words get an identity arc on the empty-context state.
    const Label num_inputs = static_cast<Label>(fst.input_labels().size());
    for (Label in = kCopyLabel + 1; in < num_inputs; ++in) {
      const Label out = fst.output_labels().Intern(fst.input_labels().Word(in));
      fst.AddArc(unigram, Arc{in, out, config.passthrough_penalty, unigram});
    }
  }
  fst.Trim();
  fst.ArcSortInput();
  return fst;
}

namespace {

struct SearchKey {
  StateId state;
  int32_t pos;
  int32_t prefix;
  bool operator==(const SearchKey &) const = default;
};

struct SearchKeyHash {
  size_t operator()(const SearchKey &k) const {
    uint64_t h = static_cast<uint32_t>(k.state);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<uint32_t>(k.pos);
    h = h * 0x9E3779B97F4A7C15ull ^ static_cast<uint32_t>(k.prefix);
    return static_cast<size_t>(h ^ (h >> 29));
  }
};

struct Hyp {
  double priority;  // cost plus the cheapest completion from (state, pos)
  double cost;
  uint64_t seq;
  StateId state;
  int32_t pos;
  int32_t prefix;
  int32_t trace;
  bool complete;
};

struct HypLater {
  bool operator()(const Hyp &a, const Hyp &b) const {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.seq > b.seq;
  }
};

// Interned output prefixes; node 0 is the empty output.
class PrefixTrie {
 public:
  PrefixTrie() : parent_{-1}, label_{kEpsLabel} {}
  int32_t Extend(int32_t node, Label label) {
    const uint64_t key =
        (static_cast<uint64_t>(static_cast<uint32_t>(node)) << 32) |
        static_cast<uint32_t>(label);
    auto [it, inserted] =
        children_.try_emplace(key, static_cast<int32_t>(parent_.size()));
    if (inserted) {
      parent_.push_back(node);
      label_.push_back(label);
    }
    return it->second;
  }
  std::vector<Label> Labels(int32_t node) const {
    std::vector<Label> out;
    for (; node > 0; node = parent_[node]) out.push_back(label_[node]);
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<int32_t> parent_;
  std::vector<Label> label_;
  std::unordered_map<uint64_t, int32_t> children_;
};

struct TraceNode {
  int32_t parent;
  StateId state;
  int32_t arc;
};

// Calls f(index, arc, next_pos) for every arc of `state` that can be taken
// at input position pos. Copy arcs only read tokens missing from the input
// labels.
template <class F>
void ForEachApplicableArc(const MappingTransducer &fst, StateId state,
                          int32_t pos, const std::vector<Label> &in_ids,
                          bool passthrough, F f) {
  const auto &arcs = fst.Arcs(state);
  const int32_t n = static_cast<int32_t>(in_ids.size());
  // Everything, or with sorted arcs the epsilon and copy arcs (labels 0 and 1
  // sort first) plus the arcs reading the next input token.
  size_t ranges[2][2] = {{0, arcs.size()}, {0, 0}};
  if (fst.input_sorted()) {
    auto by_label = [](const Arc &arc, Label l) { return arc.ilabel < l; };
    const auto first = arcs.begin();
    ranges[0][1] = static_cast<size_t>(
        std::lower_bound(first, arcs.end(), kCopyLabel + 1, by_label) - first);
    if (pos < n && in_ids[pos] > kCopyLabel) {
      auto lo = std::lower_bound(first + static_cast<std::ptrdiff_t>(ranges[0][1]),
                                 arcs.end(), in_ids[pos], by_label);
      auto hi = lo;
      while (hi != arcs.end() && hi->ilabel == in_ids[pos]) ++hi;
      ranges[1][0] = static_cast<size_t>(lo - first);
      ranges[1][1] = static_cast<size_t>(hi - first);
    }
  }
  for (const auto &range : ranges) {
    for (size_t a = range[0]; a < range[1]; ++a) {
      const Arc &arc = arcs[a];
      int32_t next_pos = pos;
      if (arc.ilabel == kCopyLabel) {
        if (!passthrough || pos == n || in_ids[pos] != -1) continue;
        ++next_pos;
      } else if (arc.ilabel != kEpsLabel) {
        if (pos == n || in_ids[pos] != arc.ilabel) continue;
        ++next_pos;
      }
      f(a, arc, next_pos);
    }
  }
}

// Exact cheapest completion cost of every (state, position) node reachable
// from (start, 0) in the product of the transducer with the input.
class CompletionCosts {
 public:
  CompletionCosts(const MappingTransducer &fst, const std::vector<Label> &in_ids,
                  bool passthrough) {
    const int32_t n = static_cast<int32_t>(in_ids.size());
    struct Edge {
      int32_t from;
      int32_t to;
      double cost;
    };
    std::vector<Edge> edges;
    Node(fst.start(), 0);
    for (size_t i = 0; i < nodes_.size(); ++i) {
      const auto [state, pos] = nodes_[i];
      deepest_ = std::max(deepest_, pos);
      ForEachApplicableArc(
          fst, state, pos, in_ids, passthrough,
          [&](size_t, const Arc &arc, int32_t next_pos) {
            const int32_t to = Node(arc.next, next_pos);
            edges.push_back(Edge{static_cast<int32_t>(i), to, arc.cost});
          });
    }
    // Reverse adjacency in CSR form, then Dijkstra from the final nodes.
    std::vector<int32_t> offsets(nodes_.size() + 1, 0);
    for (const Edge &e : edges) ++offsets[e.to + 1];
    for (size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
    std::vector<int32_t> fill(offsets.begin(), offsets.end() - 1);
    std::vector<int32_t> rev(edges.size());
    for (size_t e = 0; e < edges.size(); ++e) rev[fill[edges[e].to]++] = e;

    dist_.assign(nodes_.size(), kInfCost);
    using Item = std::pair<double, int32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
    for (size_t i = 0; i < nodes_.size(); ++i) {
      const auto [state, pos] = nodes_[i];
      if (pos == n && fst.Final(state) != kInfCost) {
        dist_[i] = fst.Final(state);
        queue.emplace(dist_[i], static_cast<int32_t>(i));
      }
    }
    while (!queue.empty()) {
      const auto [d, v] = queue.top();
      queue.pop();
      if (d > dist_[v]) continue;
      for (int32_t k = offsets[v]; k < offsets[v + 1]; ++k) {
        const Edge &e = edges[rev[k]];
        const double cand = d + e.cost;
        if (cand < dist_[e.from]) {
          dist_[e.from] = cand;
          queue.emplace(cand, e.from);
        }
      }
    }
  }

  double At(StateId state, int32_t pos) const {
    auto it = index_.find(Key(state, pos));
    return it == index_.end() ? kInfCost : dist_[it->second];
  }
  int32_t deepest() const { return deepest_; }

 private:
  static uint64_t Key(StateId state, int32_t pos) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(pos)) << 32) |
           static_cast<uint32_t>(state);
  }
  int32_t Node(StateId state, int32_t pos) {
    auto [it, inserted] =
        index_.try_emplace(Key(state, pos), static_cast<int32_t>(nodes_.size()));
    if (inserted) nodes_.emplace_back(state, pos);
    return it->second;
  }

  std::unordered_map<uint64_t, int32_t> index_;
  std::vector<std::pair<StateId, int32_t>> nodes_;
  std::vector<double> dist_;
  int32_t deepest_ = 0;
};

bool CandidateLess(const Candidate &a, const Candidate &b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.tokens.size() != b.tokens.size()) {
    return a.tokens.size() < b.tokens.size();
  }
  return a.tokens < b.tokens;
}

}  // namespace

DecodeResult NBestDecode(const MappingTransducer &fst, const Tokens &input,
                         const DecodeConfig &config) {
  config.Validate();
  const int32_t n = static_cast<int32_t>(input.size());
  DecodeResult result;
  if (fst.start() < 0 || fst.num_states() == 0) {
    throw NoPathError("empty transducer", 0);
  }

  const LabelTable &isyms = fst.input_labels();
  const LabelTable &osyms = fst.output_labels();
  std::vector<Label> in_ids(n), copy_ids(n);
  std::vector<std::string> extra_words;  // copied tokens missing from osyms
  std::unordered_map<std::string, Label> extra_index;
  for (int32_t i = 0; i < n; ++i) {
    const Label found = isyms.Find(input[i]);
    in_ids[i] = found > kCopyLabel ? found : -1;
    Label out = osyms.Find(input[i]);
    if (out <= kCopyLabel) {
      auto [it, inserted] = extra_index.try_emplace(
          input[i], static_cast<Label>(osyms.size() + extra_words.size()));
      if (inserted) extra_words.push_back(input[i]);
      out = it->second;
    }
    copy_ids[i] = out;
  }
  auto word_of = [&](Label label) -> const std::string & {
    if (static_cast<size_t>(label) < osyms.size()) return osyms.Word(label);
    return extra_words[label - osyms.size()];
  };

  const CompletionCosts completion(fst, in_ids, config.passthrough);
  const double start_rest = completion.At(fst.start(), 0);
  if (start_rest == kInfCost) {
    const int32_t deepest = completion.deepest();
    throw NoPathError("no complete path; longest matched prefix is " +
                          std::to_string(deepest) + " of " +
                          std::to_string(n) + " tokens",
                      static_cast<size_t>(deepest));
  }

  // A* over (state, position, output prefix) with the exact completion cost
  // as heuristic; candidates complete in ascending cost order.
  PrefixTrie trie;
  std::vector<TraceNode> traces;
  std::unordered_map<SearchKey, double, SearchKeyHash> best;
  std::priority_queue<Hyp, std::vector<Hyp>, HypLater> queue;
  std::unordered_map<int32_t, bool> emitted;
  std::vector<Candidate> found;
  uint64_t seq = 0;
  double limit = kInfCost;

  best[SearchKey{fst.start(), 0, 0}] = 0.0;
  queue.push(Hyp{start_rest, 0.0, seq++, fst.start(), 0, 0, -1, false});

  while (!queue.empty()) {
    const Hyp hyp = queue.top();
    if (static_cast<int>(found.size()) >= config.nbest &&
        hyp.priority > found[config.nbest - 1].cost) {
      break;
    }
    queue.pop();
    if (hyp.priority > limit) break;
    if (hyp.complete) {
      if (!emitted.emplace(hyp.prefix, true).second) continue;
      Candidate cand;
      cand.cost = hyp.cost;
      for (Label l : trie.Labels(hyp.prefix)) cand.tokens.push_back(word_of(l));
      for (int32_t t = hyp.trace; t >= 0; t = traces[t].parent) {
        cand.path.push_back(ArcRef{traces[t].state, traces[t].arc});
      }
      std::reverse(cand.path.begin(), cand.path.end());
      found.push_back(std::move(cand));
      if (found.size() == 1 && !std::isinf(config.beam)) {
        limit = hyp.cost + config.beam;
      }
      continue;
    }
    auto bit = best.find(SearchKey{hyp.state, hyp.pos, hyp.prefix});
    if (bit != best.end() && hyp.cost > bit->second) continue;

    if (hyp.pos == n && fst.Final(hyp.state) != kInfCost) {
      const double cost = hyp.cost + fst.Final(hyp.state);
      if (cost <= limit) {
        queue.push(Hyp{cost, cost, seq++, hyp.state, hyp.pos, hyp.prefix,
                       hyp.trace, true});
      }
    }
    ForEachApplicableArc(
        fst, hyp.state, hyp.pos, in_ids, config.passthrough,
        [&](size_t a, const Arc &arc, int32_t pos) {
          int32_t prefix = hyp.prefix;
          if (arc.olabel == kCopyLabel) {
            if (pos == hyp.pos) return;  // nothing consumed to copy
            prefix = trie.Extend(prefix, copy_ids[hyp.pos]);
          } else if (arc.olabel != kEpsLabel) {
            prefix = trie.Extend(prefix, arc.olabel);
          }
          const double rest = completion.At(arc.next, pos);
          if (rest == kInfCost) return;
          const double cost = hyp.cost + arc.cost;
          const double priority = cost + rest;
          if (priority > limit) return;
          const SearchKey key{arc.next, pos, prefix};
          auto [it, inserted] = best.try_emplace(key, cost);
          if (!inserted) {
            if (cost >= it->second) return;
            it->second = cost;
          }
          traces.push_back(
              TraceNode{hyp.trace, hyp.state, static_cast<int32_t>(a)});
          queue.push(Hyp{priority, cost, seq++, arc.next, pos, prefix,
                         static_cast<int32_t>(traces.size() - 1), false});
        });
  }

  if (found.empty()) {
    throw NoPathError("no complete path within the beam",
                      static_cast<size_t>(completion.deepest()));
  }
  std::stable_sort(found.begin(), found.end(), CandidateLess);
  const size_t keep = std::min<size_t>(
      found.size(), std::min(config.nbest, config.output_top_k));
  found.resize(keep);
  result.candidates = std::move(found);
  return result;
}

std::vector<DecodeResult> ApplyCorpus(const MappingTransducer &fst,
                                      const std::vector<Utterance> &utterances,
                                      const DecodeConfig &config,
                                      int num_threads, size_t *failures) {
  config.Validate();
  std::vector<DecodeResult> results(utterances.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next++; i < utterances.size(); i = next++) {
      const Utterance &utt = utterances[i];
      try {
        results[i] = NBestDecode(fst, utt.tokens, config);
      } catch (const NoPathError &) {
        results[i].candidates = {Candidate{utt.tokens, kInfCost, {}}};
        results[i].failed = true;
      }
      results[i].id = utt.id;
    }
  };
  const int workers = std::max(
      1, std::min<int>(num_threads, static_cast<int>(utterances.size())));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
  }
  if (failures) {
    *failures = static_cast<size_t>(
        std::count_if(results.begin(), results.end(),
                      [](const DecodeResult &r) { return r.failed; }));
  }
  return results;
}

std::string FormatDecodeResults(const std::vector<DecodeResult> &results) {
  std::string out;
  for (const auto &r : results) {
    for (size_t k = 0; k < r.candidates.size(); ++k) {
      out += r.id + '\t' + std::to_string(k + 1) + '\t' +
             FormatShortest(r.candidates[k].cost) + '\t' +
             Join(r.candidates[k].tokens) + '\n';
    }
  }
  return out;
}

std::string FormatTransducer(const MappingTransducer &fst) {
  std::string out(kMagic);
  out += '\n';
  out += "order\t" + std::to_string(fst.model_order()) + '\n';
  out += "states\t" + std::to_string(fst.num_states()) + '\n';
  out += "start\t" + std::to_string(fst.start()) + '\n';
  for (size_t i = 0; i < fst.input_labels().size(); ++i) {
    out += "isym\t" + std::to_string(i) + '\t' +
           fst.input_labels().Word(static_cast<Label>(i)) + '\n';
  }
  for (size_t i = 0; i < fst.output_labels().size(); ++i) {
    out += "osym\t" + std::to_string(i) + '\t' +
           fst.output_labels().Word(static_cast<Label>(i)) + '\n';
  }
  for (size_t s = 0; s < fst.num_states(); ++s) {
    for (const auto &arc : fst.Arcs(static_cast<StateId>(s))) {
      out += std::to_string(s) + '\t' + std::to_string(arc.next) + '\t' +
             fst.input_labels().Word(arc.ilabel) + '\t' +
             fst.output_labels().Word(arc.olabel) + '\t' +
             FormatPrecise(arc.cost) + '\n';
    }
  }
  for (size_t s = 0; s < fst.num_states(); ++s) {
    const double f = fst.Final(static_cast<StateId>(s));
    if (f != kInfCost) {
      out += "final\t" + std::to_string(s) + '\t' + FormatPrecise(f) + '\n';
    }
  }
  return out;
}

MappingTransducer ParseTransducer(const std::vector<std::string> &lines,
                                  const std::string &source) {
  auto fail = [&source](size_t line, const std::string &what) {
    return TransducerError(source + ":" + std::to_string(line) + ": " + what);
  };
  if (lines.empty() || lines[0] != kMagic) {
    throw fail(1, "missing T2TFST1 header");
  }
  MappingTransducer fst;
  long long num_states = -1, start = -1, order = 0;
  size_t i = 1;
  auto header_value = [&](const char *key, long long *value) {
    if (i >= lines.size()) throw fail(i + 1, std::string("missing ") + key);
    auto f = SplitFields(lines[i]);
    if (f.size() != 2 || f[0] != key || !ParseInt(f[1], value)) {
      throw fail(i + 1, std::string("expected '") + key + "<TAB>value'");
    }
    ++i;
  };
  header_value("order", &order);
  header_value("states", &num_states);
  header_value("start", &start);
  if (num_states < 0 || start < -1 || start >= num_states) {
    throw fail(i, "bad state count or start state");
  }
  fst.set_model_order(static_cast<int>(order));
  for (long long s = 0; s < num_states; ++s) fst.AddState();
  fst.SetStart(static_cast<StateId>(start));

  for (; i < lines.size(); ++i) {
    auto f = SplitFields(lines[i]);
    const size_t line_no = i + 1;
    if (!f.empty() && (f[0] == "isym" || f[0] == "osym")) {
      LabelTable &table =
          f[0] == "isym" ? fst.input_labels() : fst.output_labels();
      long long id = 0;
      if (f.size() != 3 || !ParseInt(f[1], &id) || f[2].empty()) {
        throw fail(line_no, "bad symbol entry");
      }
      if (id < static_cast<long long>(table.size())) {
        if (table.Word(static_cast<Label>(id)) != f[2]) {
          throw fail(line_no, "symbol id conflict");
        }
        continue;
      }
      if (id != static_cast<long long>(table.size()) ||
          table.Find(f[2]) >= 0) {
        throw fail(line_no, "symbol ids must be dense and unique");
      }
      table.Intern(f[2]);
      continue;
    }
    if (!f.empty() && f[0] == "final") {
      long long s = 0;
      double cost = 0;
      if (f.size() != 3 || !ParseInt(f[1], &s) || s < 0 || s >= num_states ||
          !ParseDouble(f[2], &cost) || !std::isfinite(cost)) {
        throw fail(line_no, "bad final entry");
      }
      fst.SetFinal(static_cast<StateId>(s), cost);
      continue;
    }
    long long src = 0, dst = 0;
    double cost = 0;
    if (f.size() != 5 || !ParseInt(f[0], &src) || !ParseInt(f[1], &dst) ||
        src < 0 || src >= num_states || dst < 0 || dst >= num_states ||
        !ParseDouble(f[4], &cost) || !std::isfinite(cost) || cost < 0) {
      throw fail(line_no, "bad arc entry");
    }
    const Label in = fst.input_labels().Find(f[2]);
    const Label out = fst.output_labels().Find(f[3]);
    if (in < 0 || out < 0) throw fail(line_no, "arc label not in symbol table");
    fst.AddArc(static_cast<StateId>(src),
               Arc{in, out, cost, static_cast<StateId>(dst)});
  }
  return fst;
}

MappingTransducer LoadTransducer(const std::string &path) {
  std::vector<std::string> lines;
  try {
    lines = ReadLines(path);
  } catch (const ParseError &e) {
    throw TransducerError(e.what());
  }
  return ParseTransducer(lines, path);
}

void WriteTransducer(const std::string &path, const MappingTransducer &fst) {
  WriteTextFile(path, FormatTransducer(fst));
}

}  // namespace t2t
