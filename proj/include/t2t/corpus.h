// corpus.h
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
// Paired text corpora, N-best hypothesis lists and plain transcripts.
//
// File formats (UTF-8, LF line endings, no header):
//   paired:      id <TAB> hypothesis <TAB> reference
//   N-best:      id <TAB> rank <TAB> score <TAB> hypothesis
//   transcript:  id <TAB> text

#ifndef T2T_CORPUS_H_
#define T2T_CORPUS_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace t2t {

// A normalized word: lowercase, NFC, no whitespace, never a reserved sentinel.
using Token = std::string;
using Tokens = std::vector<Token>;

inline constexpr std::string_view kEpsilon = "<eps>";
inline constexpr std::string_view kSentenceStart = "<s>";
inline constexpr std::string_view kSentenceEnd = "</s>";
inline constexpr std::string_view kUnknown = "<unk>";

bool IsReservedToken(std::string_view token);

// Lowercases, NFC-normalizes, strips the characters . , ! ? ; : " ( ) and
// splits on whitespace runs. Hyphens and apostrophes stay inside tokens.
// Throws ParseError if a resulting token is a reserved sentinel.
Tokens NormalizeText(std::string_view raw);

struct Utterance {
  std::string id;
  Tokens tokens;

  bool operator==(const Utterance &) const = default;
};

struct UtterancePair {
  std::string id;
  Tokens hypothesis;  // may be empty: the recognizer deleted everything
  Tokens reference;   // never empty
  double weight = 1.0;

  bool operator==(const UtterancePair &) const = default;
};

struct NBestEntry {
  int rank = 1;
  double score = 0.0;  // length-normalized cost, lower is better
  Tokens tokens;

  bool operator==(const NBestEntry &) const = default;
};

struct NBestList {
  std::string id;
  std::vector<NBestEntry> entries;  // ranks 1..n in order

  bool operator==(const NBestList &) const = default;
};

// Parsers take the file contents as lines plus a source name used in
// "source:line: message" diagnostics. All throw ParseError.
std::vector<UtterancePair> ParsePairedCorpus(
    const std::vector<std::string> &lines, const std::string &source);
std::vector<NBestList> ParseNBestCorpus(const std::vector<std::string> &lines,
                                        const std::string &source);
std::vector<Utterance> ParseTranscripts(const std::vector<std::string> &lines,
                                        const std::string &source);

std::vector<UtterancePair> LoadPairedCorpus(const std::string &path);
std::vector<NBestList> LoadNBestCorpus(const std::string &path);
std::vector<Utterance> LoadTranscripts(const std::string &path);

std::string FormatPairedCorpus(const std::vector<UtterancePair> &pairs);
std::string FormatNBestCorpus(const std::vector<NBestList> &lists);
std::string FormatTranscripts(const std::vector<Utterance> &utterances);

void WritePairedCorpus(const std::string &path,
                       const std::vector<UtterancePair> &pairs);
void WriteNBestCorpus(const std::string &path,
                      const std::vector<NBestList> &lists);
void WriteTranscripts(const std::string &path,
                      const std::vector<Utterance> &utterances);

enum class NBestWeighting {
  kUniform,     // each of the k kept hypotheses gets 1/k
  kRankDecay,   // proportional to 1/rank, normalized to sum to 1
};

// Pairs the top min(n, |entries|) hypotheses of each list with its
// reference. Each list contributes total weight 1. Throws InvalidArgument if
// n < 1 and ParseError if a list id has no reference.
std::vector<UtterancePair> ExpandNBestToPairs(
    const std::vector<NBestList> &lists,
    const std::map<std::string, Tokens> &references, int n,
    NBestWeighting weighting = NBestWeighting::kUniform);

std::map<std::string, Tokens> ReferenceMap(
    const std::vector<Utterance> &utterances);

}  // namespace t2t

#endif  // T2T_CORPUS_H_
