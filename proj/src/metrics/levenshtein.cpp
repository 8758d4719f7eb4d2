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

#include <algorithm>
#include <cmath>
#include <vector>

#include "common.hpp"
#include "natkit/corpus.hpp"
#include "natkit/utf8.hpp"

namespace natkit::metrics {
namespace {

template <class Seq>
std::size_t edit_distance(const Seq& a, const Seq& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::size_t levenshtein(std::span<const std::string> a, std::span<const std::string> b) {
  return edit_distance(a, b);
}

std::size_t levenshtein(std::span<const int> a, std::span<const int> b) { return edit_distance(a, b); }

std::size_t levenshtein_chars(const std::string& a, const std::string& b) {
  return edit_distance(utf8::decode(a), utf8::decode(b));
}

std::vector<Bucket> bucketed_bleu(std::span<const std::string> hyps, std::span<const std::string> refs,
                                  std::span<const double> edges) {
  detail::check_corpus(hyps, refs);
  if (edges.size() < 2) throw InvalidArgument("bucketed_bleu: need at least two bucket edges");
  for (std::size_t k = 1; k < edges.size(); ++k)
    if (!(edges[k] > edges[k - 1])) throw InvalidArgument("bucketed_bleu: edges must be strictly ascending");

  std::vector<Bucket> buckets(edges.size() - 1);
  std::vector<std::vector<SentenceStats>> members(buckets.size());
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    buckets[k].lo = edges[k];
    buckets[k].hi = edges[k + 1];
  }
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    auto stats = bleu_stats(hyps[i], refs[i]);
    const double len = stats[1];
    const auto it = std::upper_bound(edges.begin(), edges.end(), len);
    if (it == edges.begin() || it == edges.end()) {
      throw InvalidArgument("bucketed_bleu: reference length " + std::to_string(static_cast<long>(len)) +
                            " at line " + std::to_string(i + 1) + " is outside the bucket edges");
    }
    const auto k = static_cast<std::size_t>(it - edges.begin()) - 1;
    members[k].push_back(std::move(stats));
  }
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    buckets[k].n = members[k].size();
    if (!members[k].empty()) buckets[k].bleu = score_from_stats(Metric::bleu, members[k]);
  }
  return buckets;
}

}  // namespace natkit::metrics
