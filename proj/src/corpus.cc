// corpus.cc
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

#include "t2t/corpus.h"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <set>
#include <unordered_map>
#include <unordered_set>

#include "t2t/error.h"
#include "t2t/text_util.h"

namespace t2t {
namespace {

bool IsStrippedPunct(char c) {
  switch (c) {
    case '.': case ',': case '!': case '?': case ';': case ':': case '"':
    case '(': case ')':
      return true;
    default:
      return false;
  }
}

std::string LowerNfc(std::string_view raw) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2 *nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw ParseError("ICU NFC normalizer unavailable");
  // Lowercasing can denormalize (e.g. some precomposed capitals), so
  // normalize on both sides of it.
  icu::UnicodeString composed = nfc->normalize(text, status);
  composed.toLower(icu::Locale::getRoot());
  icu::UnicodeString result = nfc->normalize(composed, status);
  if (U_FAILURE(status)) throw ParseError("NFC normalization failed");
  std::string out;
  result.toUTF8String(out);
  return out;
}

}  // namespace

bool IsReservedToken(std::string_view token) {
  return token == kEpsilon || token == kSentenceStart ||
         token == kSentenceEnd || token == kUnknown;
}

Tokens NormalizeText(std::string_view raw) {
  std::string lowered = LowerNfc(raw);
  std::string stripped;
  stripped.reserve(lowered.size());
  for (char c : lowered) {
    if (!IsStrippedPunct(c)) stripped.push_back(c);
  }
  Tokens tokens = SplitWhitespace(stripped);
  for (const auto &token : tokens) {
    if (IsReservedToken(token)) {
      throw ParseError("reserved token '" + token + "' in input text");
    }
  }
  return tokens;
}

std::vector<UtterancePair> ParsePairedCorpus(
    const std::vector<std::string> &lines, const std::string &source) {
  std::vector<UtterancePair> pairs;
  std::unordered_set<std::string> seen;
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    auto fields = SplitFields(lines[i]);
    if (fields.size() != 3) {
      throw ParseError(source, line_no,
                       "expected 3 tab-separated columns, got " +
                           std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(source, line_no, "empty id");
    if (!seen.insert(fields[0]).second) {
      throw ParseError(source, line_no, "duplicate id '" + fields[0] + "'");
    }
    UtterancePair pair;
    pair.id = fields[0];
    try {
      pair.hypothesis = NormalizeText(fields[1]);
      pair.reference = NormalizeText(fields[2]);
    } catch (const ParseError &e) {
      throw ParseError(source, line_no, e.what());
    }
    if (pair.reference.empty()) {
      throw ParseError(source, line_no, "empty reference for '" + pair.id + "'");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

std::vector<NBestList> ParseNBestCorpus(const std::vector<std::string> &lines,
                                        const std::string &source) {
  std::vector<NBestList> lists;
  std::unordered_map<std::string, size_t> index;
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    auto fields = SplitFields(lines[i]);
    if (fields.size() != 4) {
      throw ParseError(source, line_no,
                       "expected 4 tab-separated columns, got " +
                           std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(source, line_no, "empty id");
    long long rank = 0;
    if (!ParseInt(fields[1], &rank) || rank < 1) {
      throw ParseError(source, line_no, "bad rank '" + fields[1] + "'");
    }
    NBestEntry entry;
    entry.rank = static_cast<int>(rank);
    if (!ParseDouble(fields[2], &entry.score)) {
      throw ParseError(source, line_no, "bad score '" + fields[2] + "'");
    }
    try {
      entry.tokens = NormalizeText(fields[3]);
    } catch (const ParseError &e) {
      throw ParseError(source, line_no, e.what());
    }
    auto [it, inserted] = index.try_emplace(fields[0], lists.size());
    if (inserted) lists.push_back(NBestList{fields[0], {}});
    NBestList &list = lists[it->second];
    const int expected = static_cast<int>(list.entries.size()) + 1;
    if (entry.rank != expected) {
      throw ParseError(source, line_no,
                       "rank " + std::to_string(entry.rank) + " for '" +
                           list.id + "', expected " + std::to_string(expected));
    }
    if (!list.entries.empty() && entry.score < list.entries.back().score) {
      throw ParseError(source, line_no,
                       "score decreases with rank for '" + list.id + "'");
    }
    list.entries.push_back(std::move(entry));
  }
  return lists;
}

std::vector<Utterance> ParseTranscripts(const std::vector<std::string> &lines,
                                        const std::string &source) {
  std::vector<Utterance> utterances;
  std::unordered_set<std::string> seen;
  for (size_t i = 0; i < lines.size(); ++i) {
    const size_t line_no = i + 1;
    auto fields = SplitFields(lines[i]);
    if (fields.size() != 2) {
      throw ParseError(source, line_no,
                       "expected 2 tab-separated columns, got " +
                           std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(source, line_no, "empty id");
    if (!seen.insert(fields[0]).second) {
      throw ParseError(source, line_no, "duplicate id '" + fields[0] + "'");
    }
    Utterance utt;
    utt.id = fields[0];
    try {
      utt.tokens = NormalizeText(fields[1]);
    } catch (const ParseError &e) {
      throw ParseError(source, line_no, e.what());
    }
    utterances.push_back(std::move(utt));
  }
  return utterances;
}

std::vector<UtterancePair> LoadPairedCorpus(const std::string &path) {
  return ParsePairedCorpus(ReadLines(path), path);
}

std::vector<NBestList> LoadNBestCorpus(const std::string &path) {
  return ParseNBestCorpus(ReadLines(path), path);
}

std::vector<Utterance> LoadTranscripts(const std::string &path) {
  return ParseTranscripts(ReadLines(path), path);
}

std::string FormatPairedCorpus(const std::vector<UtterancePair> &pairs) {
  std::string out;
  for (const auto &p : pairs) {
    out += p.id + '\t' + Join(p.hypothesis) + '\t' + Join(p.reference) + '\n';
  }
  return out;
}

std::string FormatNBestCorpus(const std::vector<NBestList> &lists) {
  std::string out;
  for (const auto &list : lists) {
    for (const auto &e : list.entries) {
      out += list.id + '\t' + std::to_string(e.rank) + '\t' +
             FormatShortest(e.score) + '\t' + Join(e.tokens) + '\n';
    }
  }
  return out;
}

std::string FormatTranscripts(const std::vector<Utterance> &utterances) {
  std::string out;
  for (const auto &u : utterances) out += u.id + '\t' + Join(u.tokens) + '\n';
  return out;
}

void WritePairedCorpus(const std::string &path,
                       const std::vector<UtterancePair> &pairs) {
  WriteTextFile(path, FormatPairedCorpus(pairs));
}

void WriteNBestCorpus(const std::string &path,
                      const std::vector<NBestList> &lists) {
  WriteTextFile(path, FormatNBestCorpus(lists));
}

void WriteTranscripts(const std::string &path,
                      const std::vector<Utterance> &utterances) {
  WriteTextFile(path, FormatTranscripts(utterances));
}

std::vector<UtterancePair> ExpandNBestToPairs(
    const std::vector<NBestList> &lists,
    const std::map<std::string, Tokens> &references, int n,
    NBestWeighting weighting) {
  if (n < 1) throw InvalidArgument("N-best expansion size must be >= 1");
  std::vector<UtterancePair> pairs;
  for (const auto &list : lists) {
    auto ref = references.find(list.id);
    if (ref == references.end()) {
      throw ParseError("no reference for N-best list '" + list.id + "'");
    }
    const size_t keep = std::min<size_t>(n, list.entries.size());
    std::vector<double> weights(keep, 1.0 / static_cast<double>(keep));
    if (weighting == NBestWeighting::kRankDecay) {
      double total = 0.0;
      for (size_t k = 0; k < keep; ++k) total += 1.0 / (k + 1.0);
      for (size_t k = 0; k < keep; ++k) weights[k] = (1.0 / (k + 1.0)) / total;
    }
    for (size_t k = 0; k < keep; ++k) {
      UtterancePair pair;
      pair.id = keep == 1 ? list.id
                          : list.id + "#" + std::to_string(list.entries[k].rank);
      pair.hypothesis = list.entries[k].tokens;
      pair.reference = ref->second;
      pair.weight = weights[k];
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

std::map<std::string, Tokens> ReferenceMap(
    const std::vector<Utterance> &utterances) {
  std::map<std::string, Tokens> refs;
  for (const auto &u : utterances) refs[u.id] = u.tokens;
  return refs;
}

}  // namespace t2t
