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

#include "natkit/glancing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "natkit/error.hpp"
#include "natkit/rng.hpp"

namespace natkit::glancing {

void GlanceSchedule::validate() const {
  if (!(lambda_start >= 0.0 && lambda_start <= 1.0))
    throw InvalidArgument("glance schedule: lambda_start must lie in [0, 1]");
  if (max_steps <= 0) throw InvalidArgument("glance schedule: max_steps must be positive");
  if (step < 0) throw InvalidArgument("glance schedule: negative step");
}

double lambda_at(const GlanceSchedule& schedule) {
  schedule.validate();
  const auto u = std::min(schedule.step, schedule.max_steps);
  return schedule.lambda_start -
         schedule.lambda_slope * static_cast<double>(u) / static_cast<double>(schedule.max_steps);
}

std::size_t hamming(std::span<const int> a, std::span<const int> b, bool strict) {
  if (strict && a.size() != b.size()) {
    throw InvalidArgument("hamming: lengths differ (" + std::to_string(a.size()) + " vs " +
                          std::to_string(b.size()) + ")");
  }
  const std::size_t n = std::min(a.size(), b.size());
  std::size_t d = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i]) ++d;
  return d;
}

std::size_t glance_count(std::span<const int> target, std::span<const int> prediction,
                         double lambda) {
  if (lambda < 0.0) throw InvalidArgument("glance_count: negative lambda");
  const auto d = hamming(target, prediction);
  // The epsilon keeps products such as 0.3 * 10 from flooring to 2.
  const auto s = static_cast<std::size_t>(std::floor(lambda * static_cast<double>(d) + 1e-9));
  return std::min(s, target.size());
}

bool GlanceMask::contains(std::size_t position) const {
  return std::binary_search(positions.begin(), positions.end(), position);
}

GlanceMask sample_glance(std::span<const int> target, std::size_t count, std::uint64_t seed) {
  if (count > target.size()) {
    throw InvalidArgument("sample_glance: cannot reveal " + std::to_string(count) + " of " +
                          std::to_string(target.size()) + " positions");
  }
  std::vector<std::size_t> order(target.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(order.size() - 1)));
    std::swap(order[i], order[j]);
  }
  GlanceMask mask;
  mask.positions.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(mask.positions.begin(), mask.positions.end());
  mask.revealed.reserve(count);
  for (auto p : mask.positions) mask.revealed.push_back(target[p]);
  return mask;
}

CtcGlance glance_inputs_ctc(std::span<const int> target, const ctc::LogProbTable& table,
                            const GlanceSchedule& schedule, std::uint64_t seed, int blank) {
  CtcGlance out;
  out.aligned_target = ctc::viterbi(table, target, blank).alignment;
  out.prediction = ctc::argmax_alignment(table);
  out.lambda = lambda_at(schedule);
  out.distance = hamming(out.aligned_target, out.prediction, true);
  const auto count = glance_count(out.aligned_target, out.prediction, out.lambda);
  out.mask = sample_glance(out.aligned_target, count, seed);
  return out;
}

}  // namespace natkit::glancing
