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

#include "natkit/corpus.hpp"
#include "natkit/error.hpp"
#include "natkit/rng.hpp"

namespace natkit {
namespace {

constexpr int kFirstContent = 5;

int shift_content(int id, int k, int n_content) {
  return kFirstContent + ((id - kFirstContent + k) % n_content + n_content) % n_content;
}

void check_content(std::span<const int> src, int n_content) {
  for (int id : src) {
    if (id < kFirstContent || id >= kFirstContent + n_content)
      throw InvalidArgument("synthetic mapping: id " + std::to_string(id) + " is not a content token");
  }
}

}  // namespace

Vocabulary synth_vocabulary(int n_content) {
  if (n_content < 3) throw InvalidArgument("synthetic vocabulary needs at least 3 content tokens");
  auto tokens = default_specials();
  for (int i = 0; i < n_content; ++i) tokens.push_back("w" + std::to_string(i));
  return Vocabulary(std::move(tokens));
}

// The appended token is the successor of the last mapped token, so the
// target never ends in a repeat and stays CTC-feasible at twice the source
// length.
std::vector<int> synth_mapping_shift(std::span<const int> src, int n_content) {
  check_content(src, n_content);
  if (src.empty()) return {};
  std::vector<int> out;
  out.reserve(src.size() + 1);
  for (int id : src) out.push_back(shift_content(id, 1, n_content));
  out.push_back(shift_content(out.back(), 1, n_content));
  return out;
}

std::vector<int> synth_mapping_reverse(std::span<const int> src, int n_content) {
  check_content(src, n_content);
  if (src.empty()) return {};
  std::vector<int> out;
  out.reserve(src.size() + 1);
  for (auto it = src.rbegin(); it != src.rend(); ++it) out.push_back(shift_content(*it, 2, n_content));
  out.push_back(shift_content(out.back(), 1, n_content));
  return out;
}

ParallelCorpus synth_task(const SynthOptions& options) {
  if (options.modes < 1 || options.modes > 2)
    throw InvalidArgument("synth_task: modes must be 1 or 2");
  if (options.min_len < 1 || options.max_len < options.min_len)
    throw InvalidArgument("synth_task: need max_len >= min_len >= 1");

  ParallelCorpus corpus;
  corpus.vocab = synth_vocabulary(options.n_content);
  corpus.seed = options.seed;
  corpus.modes = options.modes;
  corpus.name = "synth-m" + std::to_string(options.modes) + "-s" + std::to_string(options.seed);
  corpus.pairs.reserve(options.n_pairs);

  Rng rng(options.seed);
  for (std::size_t p = 0; p < options.n_pairs; ++p) {
    const auto len = rng.uniform_int(options.min_len, options.max_len);
    std::vector<int> src(static_cast<std::size_t>(len));
    for (auto& id : src)
      id = static_cast<int>(rng.uniform_int(kFirstContent, kFirstContent + options.n_content - 1));
    const bool reversed = options.modes == 2 && rng.uniform_int(0, 1) == 1;
    auto tgt = reversed ? synth_mapping_reverse(src, options.n_content)
                        : synth_mapping_shift(src, options.n_content);
    corpus.pairs.push_back({TokenSeq{std::move(src), SeqRole::source},
                            TokenSeq{std::move(tgt), SeqRole::target}});
  }
  return corpus;
}

std::pair<ParallelCorpus, ParallelCorpus> split_heldout(const ParallelCorpus& corpus,
                                                        std::size_t n_heldout) {
  if (n_heldout > corpus.size()) throw InvalidArgument("split_heldout: more held-out pairs than corpus");
  ParallelCorpus train = corpus, heldout = corpus;
  const auto cut = corpus.pairs.begin() + static_cast<std::ptrdiff_t>(corpus.size() - n_heldout);
  train.pairs.assign(corpus.pairs.begin(), cut);
  heldout.pairs.assign(cut, corpus.pairs.end());
  train.name += "-train";
  heldout.name += "-heldout";
  return {std::move(train), std::move(heldout)};
}

}  // namespace natkit
