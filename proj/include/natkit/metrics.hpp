// Copyright 2026 The natkit Authors.
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

#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace natkit::metrics {

enum class Metric { bleu, chrfpp, ter };

std::string to_string(Metric metric);  // "bleu", "chrfpp", "ter"
Metric parse_metric(const std::string& name);
std::string display_name(Metric metric);  // "BLEU", "chrF2++", "TER"
bool higher_is_better(Metric metric);
std::string signature(Metric metric);

// BLEU: [sys_len, ref_len, correct_1..4, total_1..4]
// chrF++: [hyp, ref, match] for char orders 1..6 then word orders 1..2
// TER: [edits, ref_len]
using SentenceStats = std::vector<double>;

struct ScoreReport {
  Metric metric = Metric::bleu;
  double value = 0.0;
  std::string signature;
  std::vector<SentenceStats> sentence_stats;
  std::size_t n_sentences = 0;
};

ScoreReport bleu(std::span<const std::string> hyps, std::span<const std::string> refs);
ScoreReport chrfpp(std::span<const std::string> hyps, std::span<const std::string> refs);
ScoreReport ter(std::span<const std::string> hyps, std::span<const std::string> refs);
ScoreReport score(Metric metric, std::span<const std::string> hyps,
                  std::span<const std::string> refs);

SentenceStats bleu_stats(const std::string& hyp, const std::string& ref);
SentenceStats chrfpp_stats(const std::string& hyp, const std::string& ref);
SentenceStats ter_stats(const std::string& hyp, const std::string& ref);

// Corpus score from summed sentence statistics.
double score_from_stats(Metric metric, std::span<const SentenceStats> stats);
// Same, over the sentences picked by `indices` (repeats allowed).
double score_from_stats(Metric metric, std::span<const SentenceStats> stats,
                        std::span<const std::size_t> indices);
double score_from_totals(Metric metric, std::span<const double> totals);

// Edits (shifts + beam edit distance) turning `hyp` into `ref`.
std::size_t ter_edits(std::span<const std::string> hyp, std::span<const std::string> ref);

std::size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b);
std::size_t levenshtein(std::span<const int> a, std::span<const int> b);
// Over Unicode code points.
std::size_t levenshtein_chars(const std::string& a, const std::string& b);

struct Bucket {
  double lo = 0.0;
  double hi = 0.0;  // exclusive; +inf for the last bucket
  std::size_t n = 0;
  std::optional<double> bleu;  // empty when n == 0
};

inline const std::vector<double>& default_bucket_edges() {
  static const std::vector<double> edges{0, 10, 20, 30, 40, 50,
                                         std::numeric_limits<double>::infinity()};
  return edges;
}

// Buckets by reference length in 13a tokens.
std::vector<Bucket> bucketed_bleu(std::span<const std::string> hyps,
                                  std::span<const std::string> refs,
                                  std::span<const double> edges = default_bucket_edges());

std::string to_json(std::span<const ScoreReport> reports);
// "BLEU = 57.89 (nrefs:1 | ...)"
std::string to_text(const ScoreReport& report);

}  // namespace natkit::metrics
