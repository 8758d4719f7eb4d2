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

#include <span>
#include <vector>

#include "natkit/tensor.hpp"

// CTC alignment algebra over a per-position log-probability table.
namespace natkit::ctc {

// Rows are alignment positions, columns vocabulary ids (including <blank>).
struct LogProbTable {
  Matrix values;

  int length() const { return static_cast<int>(values.rows()); }
  int vocab_size() const { return static_cast<int>(values.cols()); }

  static LogProbTable from_logits(const Matrix& logits) { return {log_softmax_rows(logits)}; }
  // Entries <= 0 and each row log-sum-exps to 0 within `tol`.
  bool is_normalized(double tol = 1e-9) const;
};

// Merges repeats, then drops blanks.
std::vector<int> collapse(std::span<const int> alignment, int blank);

// Alignment length for a source of length J and upsampling factor s.
int upsample_len(int source_len, int factor);

// Shortest alignment that collapses to `target`: one slot per token plus a
// separating blank for every adjacent repeat.
int min_alignment_length(std::span<const int> target);
bool is_feasible(std::span<const int> target, int length);

// Every alignment of `length` over ids [0, vocab_size) that collapses to
// `target`. Exponential; guarded to length <= 12 and vocab_size <= 6.
std::vector<std::vector<int>> enumerate_alignments(std::span<const int> target, int length,
                                                   int vocab_size, int blank);

// log of the total probability of all alignments collapsing to `target`.
// Returns -inf when no alignment of the table's length exists. Throws
// InvalidArgument if `target` contains `blank`.
double forward(const LogProbTable& table, std::span<const int> target, int blank);

struct Posteriors {
  double log_likelihood = kNegInf;
  // occupancy(t, k): posterior probability that position t emits id k.
  Matrix occupancy;
};

// Forward-backward. Throws InfeasibleTarget when no alignment exists.
Posteriors forward_backward(const LogProbTable& table, std::span<const int> target, int blank);

// d(-log p) / d(table entries), treating entries as free variables.
Matrix grad_log_probs(const LogProbTable& table, std::span<const int> target, int blank);

// d(-log p) / d(logits) through the row softmax that produced `table`.
Matrix grad_logits(const LogProbTable& table, std::span<const int> target, int blank);

struct ViterbiResult {
  std::vector<int> alignment;
  double log_prob = kNegInf;
};

// Most probable alignment collapsing to `target`. Among equally probable
// alignments the one that advances through the target earliest wins.
// Throws InfeasibleTarget.
ViterbiResult viterbi(const LogProbTable& table, std::span<const int> target, int blank);

// Per-row argmax, uncollapsed.
std::vector<int> argmax_alignment(const LogProbTable& table);

std::vector<int> greedy_decode(const LogProbTable& table, int blank);

}  // namespace natkit::ctc
