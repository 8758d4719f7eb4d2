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
#include <string>
#include <unordered_map>
#include <vector>

#include "natkit/error.hpp"
#include "natkit/metrics.hpp"

namespace natkit::metrics::detail {

using NgramCounts = std::unordered_map<std::string, int>;

// Strips trailing Unicode whitespace.
std::string rstrip(const std::string& s);

// Space-joined word n-grams of order n.
NgramCounts word_ngrams(std::span<const std::string> words, int n);

inline void check_corpus(std::span<const std::string> hyps, std::span<const std::string> refs) {
  if (hyps.size() != refs.size()) {
    throw InvalidArgument("hypothesis/reference count mismatch: " + std::to_string(hyps.size()) +
                          " vs " + std::to_string(refs.size()));
  }
  if (hyps.empty()) throw InvalidArgument("empty corpus");
}

}  // namespace natkit::metrics::detail
