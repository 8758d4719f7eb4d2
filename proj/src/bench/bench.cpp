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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "natkit/bench.hpp"
#include "natkit/error.hpp"

namespace natkit::bench {

LatencyStats time_decode(const std::string& label, std::size_t n_sentences, const SentenceDecoder& decode,
                         std::size_t runs, std::size_t warmup) {
  if (n_sentences == 0) throw InvalidArgument("time_decode: empty corpus");
  if (runs < 1) throw InvalidArgument("time_decode: runs must be >= 1");
  using clock = std::chrono::steady_clock;

  for (std::size_t w = 0; w < warmup; ++w) decode(w % n_sentences);

  std::vector<double> means;
  for (std::size_t r = 0; r < runs; ++r) {
    double total_ms = 0.0;
    for (std::size_t i = 0; i < n_sentences; ++i) {
      const auto t0 = clock::now();
      decode(i);
      total_ms += std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    }
    means.push_back(total_ms / static_cast<double>(n_sentences));
  }

  LatencyStats s;
  s.label = label;
  s.runs = runs;
  s.n_sentences = n_sentences;
  for (double m : means) s.mean_ms += m;
  s.mean_ms /= static_cast<double>(runs);
  if (runs > 1) {
    double ss = 0.0;
    for (double m : means) ss += (m - s.mean_ms) * (m - s.mean_ms);
    s.std_ms = std::sqrt(ss / static_cast<double>(runs - 1));
  }
  return s;
}

double speedup(const LatencyStats& base, const LatencyStats& other) {
  if (!(base.mean_ms > 0.0) || !(other.mean_ms > 0.0)) throw InvalidArgument("speedup: zero mean latency");
  return base.mean_ms / other.mean_ms;
}

std::string format_speedup(double multiplier) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", multiplier);
  return buf;
}

std::string to_tsv(std::span<const LatencyStats> stats) {
  std::ostringstream out;
  out << "label\tmean_ms\tstd_ms\truns\tspeedup_vs_base\n";
  char buf[96];
  for (const auto& s : stats) {
    std::snprintf(buf, sizeof buf, "%.4f\t%.4f\t%zu\t", s.mean_ms, s.std_ms, s.runs);
    out << s.label << '\t' << buf << format_speedup(speedup(stats.front(), s)) << '\n';
  }
  return out.str();
}

}  // namespace natkit::bench
