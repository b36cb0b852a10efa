// eval.cc
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

#include "t2t/eval.h"

#include "json.hpp"

#include <tuple>

#include "t2t/error.h"
#include "t2t/text_util.h"

namespace t2t {
namespace {

// Lexicographic preference: fewer errors, more matches, fewer substitutions.
auto Rank(const EditOps &ops) {
  return std::make_tuple(ops.errors(), -ops.matches, ops.substitutions);
}

}  // namespace

EditOps &EditOps::operator+=(const EditOps &o) {
  matches += o.matches;
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  return *this;
}

EditOps AlignEditDistance(const Tokens &hyp, const Tokens &ref) {
  const size_t m = hyp.size(), n = ref.size();
  std::vector<EditOps> prev(n + 1), cur(n + 1);
  for (size_t j = 1; j <= n; ++j) {
    prev[j] = prev[j - 1];
    prev[j].deletions += 1;
  }
  for (size_t i = 1; i <= m; ++i) {
    cur[0] = prev[0];
    cur[0].insertions += 1;
    for (size_t j = 1; j <= n; ++j) {
      EditOps diag = prev[j - 1];
      if (hyp[i - 1] == ref[j - 1]) {
        diag.matches += 1;
      } else {
        diag.substitutions += 1;
      }
      EditOps del = cur[j - 1];
      del.deletions += 1;
      EditOps ins = prev[j];
      ins.insertions += 1;
      EditOps best = diag;
      if (Rank(del) < Rank(best)) best = del;
      if (Rank(ins) < Rank(best)) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

WerReport CorpusWer(const std::vector<ScoredPair> &pairs,
                    std::optional<double> reference_wer) {
  WerReport report;
  for (const auto &p : pairs) {
    UtteranceScore score{p.id, AlignEditDistance(p.hypothesis, p.reference),
                         static_cast<long>(p.reference.size())};
    report.ops += score.ops;
    report.reference_words += score.reference_words;
    report.utterances.push_back(std::move(score));
  }
  if (report.reference_words <= 0) {
    throw EvalError("corpus has no reference words");
  }
  report.wer = static_cast<double>(report.ops.errors()) /
               static_cast<double>(report.reference_words);
  if (reference_wer) report.nwer = Nwer(report.wer, *reference_wer);
  return report;
}

double Nwer(double wer, double reference_wer) {
  if (!(reference_wer > 0)) {
    throw InvalidArgument("reference WER must be positive");
  }
  return wer / reference_wer;
}

double RelativeReduction(double baseline, double system) {
  if (!(baseline > 0)) {
    throw InvalidArgument("baseline NWER must be positive");
  }
  return 100.0 * (baseline - system) / baseline;
}

std::string FormatReportTsv(const WerReport &report) {
  std::string out = "id\tref_words\tsub\tdel\tins\twer\n";
  auto row = [&out](const std::string &id, const EditOps &ops, long words) {
    const double wer = words > 0 ? static_cast<double>(ops.errors()) /
                                       static_cast<double>(words)
                                 : 0.0;
    out += id + '\t' + std::to_string(words) + '\t' +
           std::to_string(ops.substitutions) + '\t' +
           std::to_string(ops.deletions) + '\t' +
           std::to_string(ops.insertions) + '\t' + FormatShortest(wer) + '\n';
  };
  for (const auto &u : report.utterances) row(u.id, u.ops, u.reference_words);
  row("TOTAL", report.ops, report.reference_words);
  return out;
}

std::string FormatReportJson(const WerReport &report) {
  nlohmann::ordered_json j;
  j["sub"] = report.ops.substitutions;
  j["del"] = report.ops.deletions;
  j["ins"] = report.ops.insertions;
  j["ref_words"] = report.reference_words;
  j["wer"] = report.wer;
  j["nwer"] = report.nwer ? nlohmann::ordered_json(*report.nwer)
                          : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

ReportSummary ParseReportJson(const std::string &text) {
  ReportSummary summary;
  try {
    auto j = nlohmann::json::parse(text);
    summary.wer = j.at("wer").get<double>();
    if (j.contains("nwer") && !j["nwer"].is_null()) {
      summary.nwer = j["nwer"].get<double>();
    }
  } catch (const nlohmann::json::exception &e) {
    throw ParseError(std::string("bad report: ") + e.what());
  }
  return summary;
}

}  // namespace t2t
