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

#include "natkit/ctc.hpp"

#include <algorithm>
#include <string>

#include "natkit/error.hpp"

namespace natkit::ctc {
namespace {

// Blank-interleaved target: blank, y1, blank, y2, ..., yI, blank.
std::vector<int> extend(std::span<const int> target, int blank) {
  std::vector<int> ext(2 * target.size() + 1, blank);
  for (std::size_t i = 0; i < target.size(); ++i) ext[2 * i + 1] = target[i];
  return ext;
}

// Whether state s may be entered from s-2, skipping the blank between two
// distinct labels.
bool can_skip(const std::vector<int>& ext, std::size_t s, int blank) {
  return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2];
}

void check_target(std::span<const int> target, int blank, int vocab_size) {
  for (int id : target) {
    if (id == blank) throw InvalidArgument("CTC target contains <blank>");
    if (id < 0 || id >= vocab_size)
      throw InvalidArgument("CTC target id " + std::to_string(id) + " outside table width");
  }
}

Matrix alpha_table(const LogProbTable& table, const std::vector<int>& ext, int blank) {
  const int T = table.length();
  const auto S = ext.size();
  Matrix alpha = Matrix::Constant(T, static_cast<Eigen::Index>(S), kNegInf);
  const auto& lp = table.values;
  alpha(0, 0) = lp(0, ext[0]);
  if (S > 1) alpha(0, 1) = lp(0, ext[1]);
  for (int t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = alpha(t - 1, s);
      if (s >= 1) acc = log_add(acc, alpha(t - 1, s - 1));
      if (can_skip(ext, s, blank)) acc = log_add(acc, alpha(t - 1, s - 2));
      if (acc != kNegInf) alpha(t, s) = acc + lp(t, ext[s]);
    }
  }
  return alpha;
}

// beta(t, s): log-mass of completing from state s at t, excluding the
// emission at t itself.
Matrix beta_table(const LogProbTable& table, const std::vector<int>& ext, int blank) {
  const int T = table.length();
  const auto S = ext.size();
  Matrix beta = Matrix::Constant(T, static_cast<Eigen::Index>(S), kNegInf);
  const auto& lp = table.values;
  beta(T - 1, S - 1) = 0.0;
  if (S > 1) beta(T - 1, S - 2) = 0.0;
  for (int t = T - 2; t >= 0; --t) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = beta(t + 1, s) + lp(t + 1, ext[s]);
      if (s + 1 < S) acc = log_add(acc, beta(t + 1, s + 1) + lp(t + 1, ext[s + 1]));
      if (s + 2 < S && can_skip(ext, s + 2, blank))
        acc = log_add(acc, beta(t + 1, s + 2) + lp(t + 1, ext[s + 2]));
      beta(t, s) = acc;
    }
  }
  return beta;
}

}  // namespace

bool LogProbTable::is_normalized(double tol) const {
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    double lse = kNegInf;
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      if (values(r, c) > tol) return false;
      lse = log_add(lse, values(r, c));
    }
    if (std::abs(lse) > tol) return false;
  }
  return true;
}

std::vector<int> collapse(std::span<const int> alignment, int blank) {
  std::vector<int> out;
  int prev = -1;
  bool first = true;
  for (int id : alignment) {
    if (first || id != prev) {
      if (id != blank) out.push_back(id);
    }
    prev = id;
    first = false;
  }
  return out;
}

int upsample_len(int source_len, int factor) {
  if (source_len < 1 || factor < 1) throw InvalidArgument("upsample_len: need J >= 1 and s >= 1");
  return source_len * factor;
}

int min_alignment_length(std::span<const int> target) {
  int n = static_cast<int>(target.size());
  for (std::size_t i = 1; i < target.size(); ++i)
    if (target[i] == target[i - 1]) ++n;
  return n;
}

bool is_feasible(std::span<const int> target, int length) {
  return length >= min_alignment_length(target);
}

std::vector<std::vector<int>> enumerate_alignments(std::span<const int> target, int length,
                                                   int vocab_size, int blank) {
  if (length > 12 || vocab_size > 6)
    throw InvalidArgument("enumerate_alignments: guard requires length <= 12 and |V| <= 6");
  if (length < 0 || vocab_size < 1) throw InvalidArgument("enumerate_alignments: bad shape");

  // Depth-first over all strings, pruning prefixes whose collapse already
  // disagrees with the target.
  std::vector<std::vector<int>> result;
  std::vector<int> prefix;
  auto is_target_prefix = [&](const std::vector<int>& c) {
    return c.size() <= target.size() && std::equal(c.begin(), c.end(), target.begin());
  };
  auto recurse = [&](auto&& self) -> void {
    if (static_cast<int>(prefix.size()) == length) {
      auto c = collapse(prefix, blank);
      if (c.size() == target.size() && is_target_prefix(c)) result.push_back(prefix);
      return;
    }
    for (int v = 0; v < vocab_size; ++v) {
      prefix.push_back(v);
      if (is_target_prefix(collapse(prefix, blank))) self(self);
      prefix.pop_back();
    }
  };
  recurse(recurse);
  return result;
}

double forward(const LogProbTable& table, std::span<const int> target, int blank) {
  check_target(target, blank, table.vocab_size());
  if (table.length() == 0) return target.empty() ? 0.0 : kNegInf;
  if (!is_feasible(target, table.length())) return kNegInf;
  const auto ext = extend(target, blank);
  const Matrix alpha = alpha_table(table, ext, blank);
  const auto S = ext.size();
  const int T = table.length();
  double total = alpha(T - 1, S - 1);
  if (S > 1) total = log_add(total, alpha(T - 1, S - 2));
  return total;
}

Posteriors forward_backward(const LogProbTable& table, std::span<const int> target, int blank) {
  check_target(target, blank, table.vocab_size());
  if (table.length() == 0 || !is_feasible(target, table.length())) {
    throw InfeasibleTarget("CTC target of length " + std::to_string(target.size()) +
                           " needs " + std::to_string(min_alignment_length(target)) +
                           " positions, table has " + std::to_string(table.length()));
  }
  const auto ext = extend(target, blank);
  const Matrix alpha = alpha_table(table, ext, blank);
  const Matrix beta = beta_table(table, ext, blank);
  const int T = table.length();
  const auto S = ext.size();

  Posteriors out;
  out.log_likelihood = alpha(T - 1, S - 1);
  if (S > 1) out.log_likelihood = log_add(out.log_likelihood, alpha(T - 1, S - 2));
  if (!std::isfinite(out.log_likelihood))
    throw InfeasibleTarget("CTC target has zero probability under the table");

  out.occupancy = Matrix::Zero(T, table.vocab_size());
  for (int t = 0; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      const double lg = alpha(t, s) + beta(t, s);
      if (lg == kNegInf) continue;
      out.occupancy(t, ext[s]) += std::exp(lg - out.log_likelihood);
    }
  }
  return out;
}

Matrix grad_log_probs(const LogProbTable& table, std::span<const int> target, int blank) {
  return -forward_backward(table, target, blank).occupancy;
}

Matrix grad_logits(const LogProbTable& table, std::span<const int> target, int blank) {
  const auto post = forward_backward(table, target, blank);
  return table.values.array().exp().matrix() - post.occupancy;
}

ViterbiResult viterbi(const LogProbTable& table, std::span<const int> target, int blank) {
  check_target(target, blank, table.vocab_size());
  const int T = table.length();
  if (T == 0 || !is_feasible(target, T)) {
    throw InfeasibleTarget("Viterbi: target of length " + std::to_string(target.size()) +
                           " infeasible for " + std::to_string(T) + " positions");
  }
  const auto ext = extend(target, blank);
  const auto S = ext.size();
  const auto& lp = table.values;

  // best(t, s): best score from state s at t to the end, emission at t
  // included. Traced forward so that ties resolve toward larger states.
  Matrix best = Matrix::Constant(T, static_cast<Eigen::Index>(S), kNegInf);
  best(T - 1, S - 1) = lp(T - 1, ext[S - 1]);
  if (S > 1) best(T - 1, S - 2) = lp(T - 1, ext[S - 2]);
  for (int t = T - 2; t >= 0; --t) {
    for (std::size_t s = 0; s < S; ++s) {
      double m = best(t + 1, s);
      if (s + 1 < S) m = std::max(m, best(t + 1, s + 1));
      if (s + 2 < S && can_skip(ext, s + 2, blank)) m = std::max(m, best(t + 1, s + 2));
      if (m != kNegInf) best(t, s) = lp(t, ext[s]) + m;
    }
  }

  std::size_t s = 0;
  if (S > 1 && best(0, 1) >= best(0, 0)) s = 1;
  ViterbiResult out;
  out.log_prob = best(0, s);
  out.alignment.reserve(static_cast<std::size_t>(T));
  out.alignment.push_back(ext[s]);
  for (int t = 1; t < T; ++t) {
    // Preference on ties: skip ahead, then step, then stay.
    std::size_t next = s;
    double value = kNegInf;
    bool found = false;
    auto consider = [&](std::size_t cand) {
      if (!found || best(t, cand) > value) {
        next = cand;
        value = best(t, cand);
        found = true;
      }
    };
    if (s + 2 < S && can_skip(ext, s + 2, blank)) consider(s + 2);
    if (s + 1 < S) consider(s + 1);
    consider(s);
    s = next;
    out.alignment.push_back(ext[s]);
  }
  return out;
}

std::vector<int> argmax_alignment(const LogProbTable& table) {
  std::vector<int> out(static_cast<std::size_t>(table.length()));
  for (int t = 0; t < table.length(); ++t) out[t] = argmax_row(table.values, t);
  return out;
}

std::vector<int> greedy_decode(const LogProbTable& table, int blank) {
  return collapse(argmax_alignment(table), blank);
}

}  // namespace natkit::ctc
