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
#include <thread>
#include <vector>

#include "doctest.h"
#include "natkit/bench.hpp"
#include "natkit/error.hpp"

using namespace natkit;
using namespace natkit::bench;

TEST_CASE("sleeping decoder") {
  const auto s = time_decode("sleep", 5, [](std::size_t) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }, 3, 1);
  CHECK(s.mean_ms >= 9.0);
  CHECK(s.mean_ms <= 30.0);
  CHECK(s.runs == 3);
  CHECK(s.n_sentences == 5);
  CHECK(s.std_ms >= 0.0);
}

TEST_CASE("single run has zero spread") {
  const auto s = time_decode("one", 3, [](std::size_t) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }, 1, 0);
  CHECK(s.std_ms == 0.0);
}

TEST_CASE("per-sentence mean is invariant to corpus size") {
  auto work = [](std::size_t) { std::this_thread::sleep_for(std::chrono::milliseconds(2)); };
  const auto a = time_decode("a", 5, work, 3, 1);
  const auto b = time_decode("b", 10, work, 3, 1);
  CHECK(b.mean_ms == doctest::Approx(a.mean_ms).epsilon(0.2));
}

TEST_CASE("warmup calls are not timed") {
  std::vector<std::size_t> calls;
  time_decode("w", 2, [&](std::size_t i) { calls.push_back(i); }, 2, 3);
  CHECK(calls == std::vector<std::size_t>{0, 1, 0, 0, 1, 0, 1});
}

TEST_CASE("speedups") {
  LatencyStats base{"base", 100.0, 0, 3, 1}, fast{"fast", 12.5, 0, 3, 1}, mid{"mid", 40.0, 0, 3, 1};
  CHECK(speedup(base, base) == 1.0);
  CHECK(format_speedup(speedup(base, fast)) == "8.0");
  CHECK(speedup(base, fast) == doctest::Approx(speedup(base, mid) * speedup(mid, fast)));
  LatencyStats zero{"zero", 0.0, 0, 1, 1};
  CHECK_THROWS_AS(speedup(base, zero), InvalidArgument);
  const std::vector<LatencyStats> all{base, fast};
  CHECK(to_tsv(all) ==
        "label\tmean_ms\tstd_ms\truns\tspeedup_vs_base\n"
        "base\t100.0000\t0.0000\t3\t1.0\n"
        "fast\t12.5000\t0.0000\t3\t8.0\n");
}

TEST_CASE("harness errors") {
  CHECK_THROWS_AS(time_decode("x", 0, [](std::size_t) {}), InvalidArgument);
  CHECK_THROWS_AS(time_decode("x", 1, [](std::size_t) {}, 0), InvalidArgument);
}
