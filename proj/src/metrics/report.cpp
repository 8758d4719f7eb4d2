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

#include <cstdio>

#include "json.hpp"

#include "common.hpp"
#include "natkit/version.hpp"

namespace natkit::metrics {
namespace detail {
double bleu_from_totals(std::span<const double> totals);
double chrfpp_from_totals(std::span<const double> totals);
}  // namespace detail

namespace {

std::size_t stats_width(Metric metric) {
  switch (metric) {
    case Metric::bleu: return 10;
    case Metric::chrfpp: return 24;
    case Metric::ter: return 2;
  }
  return 0;
}

}  // namespace

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::bleu: return "bleu";
    case Metric::chrfpp: return "chrfpp";
    case Metric::ter: return "ter";
  }
  return "?";
}

Metric parse_metric(const std::string& name) {
  if (name == "bleu") return Metric::bleu;
  if (name == "chrfpp" || name == "chrf++") return Metric::chrfpp;
  if (name == "ter") return Metric::ter;
  throw InvalidArgument("unknown metric: " + name);
}

std::string display_name(Metric metric) {
  switch (metric) {
    case Metric::bleu: return "BLEU";
    case Metric::chrfpp: return "chrF2++";
    case Metric::ter: return "TER";
  }
  return "?";
}

bool higher_is_better(Metric metric) { return metric != Metric::ter; }

std::string signature(Metric metric) {
  const std::string version = " | version:natkit-" NATKIT_VERSION_STRING;
  switch (metric) {
    case Metric::bleu:
      return "nrefs:1 | case:mixed | eff:no | tok:13a | smooth:exp" + version;
    case Metric::chrfpp:
      return "nrefs:1 | case:mixed | eff:yes | nc:6 | nw:2 | space:no" + version;
    case Metric::ter:
      return "nrefs:1 | case:mixed | tok:tercom | norm:no | punct:yes | asian:no" + version;
  }
  return {};
}

double score_from_totals(Metric metric, std::span<const double> totals) {
  if (totals.size() != stats_width(metric)) throw InvalidArgument("wrong statistics width for " + to_string(metric));
  switch (metric) {
    case Metric::bleu: return detail::bleu_from_totals(totals);
    case Metric::chrfpp: return detail::chrfpp_from_totals(totals);
    case Metric::ter: {
      if (totals[1] > 0) return 100.0 * (totals[0] / totals[1]);
      return totals[0] > 0 ? 100.0 : 0.0;
    }
  }
  return 0.0;
}

double score_from_stats(Metric metric, std::span<const SentenceStats> stats) {
  std::vector<double> totals(stats_width(metric), 0.0);
  for (const auto& s : stats) {
    if (s.size() != totals.size()) throw InvalidArgument("wrong statistics width for " + to_string(metric));
    for (std::size_t k = 0; k < totals.size(); ++k) totals[k] += s[k];
  }
  return score_from_totals(metric, totals);
}

double score_from_stats(Metric metric, std::span<const SentenceStats> stats,
                        std::span<const std::size_t> indices) {
  std::vector<double> totals(stats_width(metric), 0.0);
  for (auto i : indices) {
    const auto& s = stats[i];
    if (s.size() != totals.size()) throw InvalidArgument("wrong statistics width for " + to_string(metric));
    for (std::size_t k = 0; k < totals.size(); ++k) totals[k] += s[k];
  }
  return score_from_totals(metric, totals);
}

ScoreReport score(Metric metric, std::span<const std::string> hyps, std::span<const std::string> refs) {
  switch (metric) {
    case Metric::bleu: return bleu(hyps, refs);
    case Metric::chrfpp: return chrfpp(hyps, refs);
    case Metric::ter: return ter(hyps, refs);
  }
  throw InvalidArgument("unknown metric");
}

std::string to_json(std::span<const ScoreReport> reports) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    arr.push_back({{"metric", display_name(r.metric)},
                   {"value", r.value},
                   {"signature", r.signature},
                   {"n_sentences", r.n_sentences}});
  }
  return arr.dump(2);
}

std::string to_text(const ScoreReport& report) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", report.value);
  return display_name(report.metric) + " = " + buf + " (" + report.signature + ")";
}

}  // namespace natkit::metrics
