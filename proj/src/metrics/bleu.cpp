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

#include "common.hpp"
#include "natkit/corpus.hpp"
#include "natkit/utf8.hpp"

namespace natkit::metrics {
namespace detail {

std::string rstrip(const std::string& s) {
  auto cps = utf8::decode(s);
  while (!cps.empty() && utf8::is_space(cps.back())) cps.pop_back();
  return utf8::encode(cps);
}

NgramCounts word_ngrams(std::span<const std::string> words, int n) {
  NgramCounts out;
  const auto N = static_cast<std::size_t>(n);
  for (std::size_t i = 0; i + N <= words.size(); ++i) {
    std::string key = words[i];
    for (std::size_t k = 1; k < N; ++k) {
      key += ' ';
      key += words[i + k];
    }
    ++out[key];
  }
  return out;
}

}  // namespace detail

namespace {

constexpr int kMaxOrder = 4;

double my_log(double x) { return x == 0.0 ? -9999999999.0 : std::log(x); }

}  // namespace

SentenceStats bleu_stats(const std::string& hyp, const std::string& ref) {
  const auto h = tokenize_13a(detail::rstrip(hyp));
  const auto r = tokenize_13a(detail::rstrip(ref));
  SentenceStats s(2 + 2 * kMaxOrder, 0.0);
  s[0] = static_cast<double>(h.size());
  s[1] = static_cast<double>(r.size());
  for (int n = 1; n <= kMaxOrder; ++n) {
    const auto hc = detail::word_ngrams(h, n);
    const auto rc = detail::word_ngrams(r, n);
    int correct = 0;
    for (const auto& [g, c] : hc) {
      auto it = rc.find(g);
      if (it != rc.end()) correct += std::min(c, it->second);
    }
    s[static_cast<std::size_t>(1 + n)] = correct;
    s[static_cast<std::size_t>(1 + kMaxOrder + n)] =
        static_cast<double>(h.size() >= static_cast<std::size_t>(n) ? h.size() - static_cast<std::size_t>(n) + 1 : 0);
  }
  return s;
}

namespace detail {

double bleu_from_totals(std::span<const double> t) {
  const double sys_len = t[0], ref_len = t[1];
  const double bp = sys_len < ref_len ? (sys_len > 0 ? std::exp(1.0 - ref_len / sys_len) : 0.0) : 1.0;
  bool any = false;
  for (int n = 0; n < kMaxOrder; ++n) any = any || t[static_cast<std::size_t>(2 + n)] != 0.0;
  if (!any) return 0.0;
  double precisions[kMaxOrder] = {0.0, 0.0, 0.0, 0.0};
  double smooth = 1.0;
  for (int n = 0; n < kMaxOrder; ++n) {
    const double correct = t[static_cast<std::size_t>(2 + n)];
    const double total = t[static_cast<std::size_t>(2 + kMaxOrder + n)];
    if (total == 0.0) break;
    if (correct == 0.0) {
      smooth *= 2.0;
      precisions[n] = 100.0 / (smooth * total);
    } else {
      precisions[n] = 100.0 * correct / total;
    }
  }
  double sum = 0.0;
  for (double p : precisions) sum += my_log(p);
  return bp * std::exp(sum / kMaxOrder);
}

}  // namespace detail

ScoreReport bleu(std::span<const std::string> hyps, std::span<const std::string> refs) {
  detail::check_corpus(hyps, refs);
  ScoreReport r;
  r.metric = Metric::bleu;
  r.signature = signature(Metric::bleu);
  r.n_sentences = hyps.size();
  for (std::size_t i = 0; i < hyps.size(); ++i) r.sentence_stats.push_back(bleu_stats(hyps[i], refs[i]));
  r.value = score_from_stats(Metric::bleu, r.sentence_stats);
  return r;
}

}  // namespace natkit::metrics
