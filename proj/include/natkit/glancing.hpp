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

#include <cstdint>
#include <span>
#include <vector>

#include "natkit/ctc.hpp"

// Glancing sampling: reveal a prediction-error-proportional random subset of
// ground-truth tokens to the decoder during training.
namespace natkit::glancing {

// Linear schedule lambda(u) = lambda_start - lambda_slope * u / max_steps.
struct GlanceSchedule {
  double lambda_start = 0.5;
  double lambda_slope = 0.2;
  std::int64_t step = 0;
  std::int64_t max_steps = 1;

  // Throws InvalidArgument unless 0 <= lambda_start <= 1 and max_steps > 0.
  void validate() const;
};

// Steps beyond max_steps clamp to lambda_start - lambda_slope.
double lambda_at(const GlanceSchedule& schedule);

// Position-wise disagreements. Unequal lengths compare over the shorter
// length and add the length difference, unless `strict` is set, in which
// case they throw InvalidArgument.
std::size_t hamming(std::span<const int> a, std::span<const int> b, bool strict = false);

// floor(lambda * hamming(target, prediction)), capped at |target|.
std::size_t glance_count(std::span<const int> target, std::span<const int> prediction,
                         double lambda);

struct GlanceMask {
  // 0-based, ascending.
  std::vector<std::size_t> positions;
  // Ground-truth token at each position.
  std::vector<int> revealed;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  bool contains(std::size_t position) const;
};

// Uniformly random `count`-subset of target positions, without replacement.
// Throws InvalidArgument if count > |target|.
GlanceMask sample_glance(std::span<const int> target, std::size_t count, std::uint64_t seed);

struct CtcGlance {
  GlanceMask mask;
  std::vector<int> aligned_target;  // Viterbi alignment of the target
  std::vector<int> prediction;      // per-row argmax alignment
  std::size_t distance = 0;
  double lambda = 0.0;
};

// Glancing in alignment space: the Viterbi alignment stands in for the
// target, the raw argmax alignment for the prediction. Throws
// InfeasibleTarget.
CtcGlance glance_inputs_ctc(std::span<const int> target, const ctc::LogProbTable& table,
                            const GlanceSchedule& schedule, std::uint64_t seed, int blank);

}  // namespace natkit::glancing
