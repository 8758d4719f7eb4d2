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
#include <functional>
#include <span>
#include <string>

namespace natkit::bench {

struct LatencyStats {
  std::string label;
  double mean_ms = 0.0;  // mean over runs of the per-sentence average
  double std_ms = 0.0;   // sample std over run means, 0 for a single run
  std::size_t runs = 0;
  std::size_t n_sentences = 0;
};

// Decodes sentence `index` with batch size 1.
using SentenceDecoder = std::function<void(std::size_t index)>;

LatencyStats time_decode(const std::string& label, std::size_t n_sentences,
                         const SentenceDecoder& decode, std::size_t runs = 3,
                         std::size_t warmup = 3);

// base.mean / other.mean.
double speedup(const LatencyStats& base, const LatencyStats& other);
std::string format_speedup(double multiplier);  // one decimal

// Columns: label, mean_ms, std_ms, runs, speedup_vs_base; the first entry
// is the base.
std::string to_tsv(std::span<const LatencyStats> stats);

}  // namespace natkit::bench
