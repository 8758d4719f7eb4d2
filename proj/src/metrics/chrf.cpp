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
#include <string_view>
#include <unordered_map>

#include "common.hpp"
#include "natkit/corpus.hpp"
#include "natkit/utf8.hpp"

namespace natkit::metrics {
namespace {

constexpr int kCharOrder = 6;
constexpr int kWordOrder = 2;
constexpr double kBeta = 2.0;
constexpr std::string_view kPuncts = "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

bool is_punct(char32_t c) { return c < 0x80 && kPuncts.find(static_cast<char>(c)) != std::string_view::npos; }

std::vector<std::string> split_punctuation(const std::string& sent) {
  std::vector<std::string> out;
  for (const auto& w : split_whitespace(sent)) {
    const auto cps = utf8::decode(w);
    if (cps.size() == 1) {
      out.push_back(w);
    } else if (is_punct(cps.back())) {
      out.push_back(utf8::encode(std::u32string_view(cps).substr(0, cps.size() - 1)));
      out.push_back(utf8::encode(std::u32string_view(cps).substr(cps.size() - 1)));
    } else if (is_punct(cps.front())) {
      out.push_back(utf8::encode(std::u32string_view(cps).substr(0, 1)));
      out.push_back(utf8::encode(std::u32string_view(cps).substr(1)));
    } else {
      out.push_back(w);
    }
  }
  return out;
}

template <class Counts>
void match_stats(const Counts& hyp, const Counts& ref, SentenceStats& out) {
  int hyp_count = 0, ref_count = 0, match = 0;
  for (const auto& [g, c] : hyp) {
    hyp_count += c;
    auto it = ref.find(g);
    if (it != ref.end()) match += std::min(c, it->second);
  }
  for (const auto& [g, c] : ref) ref_count += c;
  out.push_back(ref.empty() ? 0 : hyp_count);
  out.push_back(ref_count);
  out.push_back(match);
}

std::vector<std::unordered_map<std::u32string, int>> char_ngrams(const std::string& line) {
  std::u32string s;
  for (char32_t c : utf8::decode(line))
    if (!utf8::is_space(c)) s.push_back(c);
  std::vector<std::unordered_map<std::u32string, int>> out(kCharOrder);
  for (std::size_t n = 1; n <= kCharOrder; ++n)
    for (std::size_t i = 0; i + n <= s.size(); ++i) ++out[n - 1][s.substr(i, n)];
  return out;
}

}  // namespace

SentenceStats chrfpp_stats(const std::string& hyp, const std::string& ref) {
  SentenceStats s;
  s.reserve(3 * (kCharOrder + kWordOrder));
  const auto hc = char_ngrams(hyp);
  const auto rc = char_ngrams(ref);
  for (int n = 0; n < kCharOrder; ++n) match_stats(hc[static_cast<std::size_t>(n)], rc[static_cast<std::size_t>(n)], s);
  const auto hw = split_punctuation(hyp);
  const auto rw = split_punctuation(ref);
  for (int n = 1; n <= kWordOrder; ++n) match_stats(detail::word_ngrams(hw, n), detail::word_ngrams(rw, n), s);
  return s;
}

namespace detail {

double chrfpp_from_totals(std::span<const double> t) {
  const double factor = kBeta * kBeta;
  double avg_prec = 0.0, avg_rec = 0.0;
  int effective = 0;
  for (int i = 0; i < kCharOrder + kWordOrder; ++i) {
    const double n_hyp = t[static_cast<std::size_t>(3 * i)];
    const double n_ref = t[static_cast<std::size_t>(3 * i + 1)];
    const double n_match = t[static_cast<std::size_t>(3 * i + 2)];
    if (n_hyp > 0 && n_ref > 0) {
      avg_prec += n_match / n_hyp;
      avg_rec += n_match / n_ref;
      ++effective;
    }
  }
  if (effective == 0) return 0.0;
  avg_prec /= effective;
  avg_rec /= effective;
  if (avg_prec + avg_rec == 0.0) return 0.0;
  double score = (1 + factor) * avg_prec * avg_rec;
  score /= factor * avg_prec + avg_rec;
  return 100.0 * score;
}

}  // namespace detail

ScoreReport chrfpp(std::span<const std::string> hyps, std::span<const std::string> refs) {
  detail::check_corpus(hyps, refs);
  ScoreReport r;
  r.metric = Metric::chrfpp;
  r.signature = signature(Metric::chrfpp);
  r.n_sentences = hyps.size();
  for (std::size_t i = 0; i < hyps.size(); ++i) r.sentence_stats.push_back(chrfpp_stats(hyps[i], refs[i]));
  r.value = score_from_stats(Metric::chrfpp, r.sentence_stats);
  return r;
}

}  // namespace natkit::metrics
