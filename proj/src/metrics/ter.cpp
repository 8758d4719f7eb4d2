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
#include <cstdint>
#include <map>
#include <string>

#include "common.hpp"
#include "natkit/corpus.hpp"

namespace natkit::metrics {
namespace {

constexpr int kMaxShiftSize = 10;
constexpr int kMaxShiftDist = 50;
constexpr int kBeamWidth = 25;
constexpr int kMaxShiftCandidates = 1000;
constexpr std::int64_t kInf = 10000000000000000LL;

constexpr char kIns = 'i';
constexpr char kDel = 'd';
constexpr char kNop = ' ';
constexpr char kSub = 's';
constexpr char kUndef = 'x';

using Words = std::vector<int>;

struct Cell {
  std::int64_t cost = kInf;
  char op = kUndef;
};

struct EditResult {
  std::int64_t distance = 0;
  std::string trace;
};

EditResult beam_edit_distance(const Words& h, const Words& r) {
  const auto n_h = static_cast<std::int64_t>(h.size());
  const auto n_r = static_cast<std::int64_t>(r.size());
  std::vector<std::vector<Cell>> dist(static_cast<std::size_t>(n_h + 1),
                                      std::vector<Cell>(static_cast<std::size_t>(n_r + 1)));
  for (std::int64_t j = 0; j <= n_r; ++j) dist[0][static_cast<std::size_t>(j)] = {j, kIns};

  const double ratio = n_h > 0 ? static_cast<double>(n_r) / static_cast<double>(n_h) : 1.0;
  const std::int64_t beam =
      kBeamWidth < ratio / 2 ? static_cast<std::int64_t>(std::ceil(ratio / 2 + kBeamWidth)) : kBeamWidth;

  for (std::int64_t i = 1; i <= n_h; ++i) {
    const auto diag = static_cast<std::int64_t>(std::floor(static_cast<double>(i) * ratio));
    const std::int64_t min_j = std::max<std::int64_t>(0, diag - beam);
    std::int64_t max_j = std::min(n_r + 1, diag + beam);
    if (i == n_h) max_j = n_r + 1;
    auto& row = dist[static_cast<std::size_t>(i)];
    const auto& prev = dist[static_cast<std::size_t>(i - 1)];
    for (std::int64_t j = min_j; j < max_j; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      if (j == 0) {
        row[uj] = {prev[uj].cost + 1, kDel};
        continue;
      }
      const bool same = h[static_cast<std::size_t>(i - 1)] == r[uj - 1];
      const Cell ops[3] = {{prev[uj - 1].cost + (same ? 0 : 1), same ? kNop : kSub},
                           {prev[uj].cost + 1, kDel},
                           {row[uj - 1].cost + 1, kIns}};
      for (const auto& op : ops)
        if (row[uj].cost > op.cost) row[uj] = op;
    }
  }

  std::string trace;
  std::int64_t i = n_h, j = n_r;
  while (i > 0 || j > 0) {
    const char op = dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].op;
    trace.push_back(op);
    if (op == kSub || op == kNop) {
      --i;
      --j;
    } else if (op == kIns) {
      --j;
    } else if (op == kDel) {
      --i;
    } else {
      throw Error("TER: undefined edit operation in trace");
    }
  }
  std::reverse(trace.begin(), trace.end());
  return {dist[static_cast<std::size_t>(n_h)][static_cast<std::size_t>(n_r)].cost, trace};
}

struct Alignment {
  std::vector<std::int64_t> align;  // ref position -> hyp position, -2 when absent
  std::vector<int> ref_err, hyp_err;
};

Alignment trace_to_alignment(const std::string& trace, std::size_t n_ref) {
  Alignment a;
  a.align.assign(n_ref, -2);
  std::int64_t pos_hyp = -1, pos_ref = -1;
  for (char op : trace) {
    if (op == kNop || op == kSub) {
      ++pos_hyp;
      ++pos_ref;
      a.align[static_cast<std::size_t>(pos_ref)] = pos_hyp;
      a.hyp_err.push_back(op == kSub);
      a.ref_err.push_back(op == kSub);
    } else if (op == kIns) {
      ++pos_hyp;
      a.hyp_err.push_back(1);
    } else if (op == kDel) {
      ++pos_ref;
      a.align[static_cast<std::size_t>(pos_ref)] = pos_hyp;
      a.ref_err.push_back(1);
    }
  }
  return a;
}

int err_sum(const std::vector<int>& err, std::size_t start, std::size_t length) {
  int s = 0;
  for (std::size_t k = start; k < std::min(err.size(), start + length); ++k) s += err[k];
  return s;
}

void append_slice(Words& out, const Words& w, std::int64_t a, std::int64_t b) {
  const auto n = static_cast<std::int64_t>(w.size());
  a = std::clamp<std::int64_t>(a, 0, n);
  b = std::clamp<std::int64_t>(b, 0, n);
  if (a < b) out.insert(out.end(), w.begin() + a, w.begin() + b);
}

Words perform_shift(const Words& w, std::int64_t start, std::int64_t length, std::int64_t target) {
  const auto n = static_cast<std::int64_t>(w.size());
  Words out;
  out.reserve(w.size());
  if (target < start) {
    append_slice(out, w, 0, target);
    append_slice(out, w, start, start + length);
    append_slice(out, w, target, start);
    append_slice(out, w, start + length, n);
  } else if (target > start + length) {
    append_slice(out, w, 0, start);
    append_slice(out, w, start + length, target);
    append_slice(out, w, start, start + length);
    append_slice(out, w, target, n);
  } else {
    append_slice(out, w, 0, start);
    append_slice(out, w, start + length, length + target);
    append_slice(out, w, start, start + length);
    append_slice(out, w, length + target, n);
  }
  return out;
}

struct ShiftResult {
  std::int64_t gain = 0;
  Words words;
};

ShiftResult best_shift(const Words& h, const Words& r, int& checked) {
  const auto ed = beam_edit_distance(h, r);
  std::string trace = ed.trace;
  for (char& op : trace) op = op == kIns ? kDel : op == kDel ? kIns : op;
  const auto al = trace_to_alignment(trace, r.size());

  bool have = false;
  std::int64_t best_gain = 0, best_len = 0, best_neg_start = 0, best_neg_idx = 0;
  Words best_words;

  const auto n_h = static_cast<std::int64_t>(h.size());
  const auto n_r = static_cast<std::int64_t>(r.size());
  bool stop = false;
  for (std::int64_t start_h = 0; start_h < n_h && !stop; ++start_h) {
    for (std::int64_t start_r = 0; start_r < n_r && !stop; ++start_r) {
      if (std::abs(start_r - start_h) > kMaxShiftDist) continue;
      std::int64_t length = 0;
      while (h[static_cast<std::size_t>(start_h + length)] == r[static_cast<std::size_t>(start_r + length)] &&
             length < kMaxShiftSize) {
        ++length;
        // Candidate (start_h, start_r, length).
        const bool skip =
            err_sum(al.hyp_err, static_cast<std::size_t>(start_h), static_cast<std::size_t>(length)) == 0 ||
            err_sum(al.ref_err, static_cast<std::size_t>(start_r), static_cast<std::size_t>(length)) == 0 ||
            (start_h <= al.align[static_cast<std::size_t>(start_r)] &&
             al.align[static_cast<std::size_t>(start_r)] < start_h + length);
        if (!skip) {
          std::int64_t prev_idx = -1;
          for (std::int64_t offset = -1; offset < length; ++offset) {
            std::int64_t idx;
            const std::int64_t pos = start_r + offset;
            if (pos == -1) {
              idx = 0;
            } else if (pos < n_r && al.align[static_cast<std::size_t>(pos)] != -2) {
              idx = al.align[static_cast<std::size_t>(pos)] + 1;
            } else {
              break;
            }
            if (idx == prev_idx) continue;
            prev_idx = idx;
            auto shifted = perform_shift(h, start_h, length, idx);
            const std::int64_t gain = ed.distance - beam_edit_distance(shifted, r).distance;
            ++checked;
            const auto key = std::make_tuple(gain, length, -start_h, -idx);
            if (!have || key > std::make_tuple(best_gain, best_len, best_neg_start, best_neg_idx)) {
              have = true;
              std::tie(best_gain, best_len, best_neg_start, best_neg_idx) = key;
              best_words = std::move(shifted);
            }
          }
          if (checked >= kMaxShiftCandidates) {
            stop = true;
            break;
          }
        }
        if (n_h == start_h + length || n_r == start_r + length) break;
      }
    }
  }
  if (!have) return {0, h};
  return {best_gain, std::move(best_words)};
}

}  // namespace

std::size_t ter_edits(std::span<const std::string> hyp, std::span<const std::string> ref) {
  if (ref.empty()) return hyp.size();
  std::map<std::string, int> ids;
  auto intern = [&](std::span<const std::string> words) {
    Words out;
    for (const auto& w : words) out.push_back(ids.emplace(w, static_cast<int>(ids.size())).first->second);
    return out;
  };
  Words h = intern(hyp);
  const Words r = intern(ref);
  std::int64_t shifts = 0;
  int checked = 0;
  for (;;) {
    auto s = best_shift(h, r, checked);
    if (checked >= kMaxShiftCandidates) break;
    if (s.gain <= 0) break;
    ++shifts;
    h = std::move(s.words);
  }
  return static_cast<std::size_t>(shifts + beam_edit_distance(h, r).distance);
}

SentenceStats ter_stats(const std::string& hyp, const std::string& ref) {
  const auto h = split_whitespace(hyp);
  const auto r = split_whitespace(ref);
  if (r.empty()) throw InvalidArgument("TER: empty reference sentence");
  return {static_cast<double>(ter_edits(h, r)), static_cast<double>(r.size())};
}

ScoreReport ter(std::span<const std::string> hyps, std::span<const std::string> refs) {
  detail::check_corpus(hyps, refs);
  ScoreReport rep;
  rep.metric = Metric::ter;
  rep.signature = signature(Metric::ter);
  rep.n_sentences = hyps.size();
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    try {
      rep.sentence_stats.push_back(ter_stats(hyps[i], refs[i]));
    } catch (const InvalidArgument&) {
      throw InvalidArgument("TER: empty reference at line " + std::to_string(i + 1));
    }
  }
  rep.value = score_from_stats(Metric::ter, rep.sentence_stats);
  return rep;
}

}  // namespace natkit::metrics
