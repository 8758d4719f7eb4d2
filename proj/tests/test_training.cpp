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

#include "doctest.h"
#include "natkit/corpus.hpp"
#include "natkit/model.hpp"

using namespace natkit;
using namespace natkit::model;

TEST_CASE("ctc with glancing learns the single-mode task") {
  SynthOptions so;
  so.n_pairs = 2000;
  so.seed = 11;
  const auto corpus = synth_task(so);
  const auto [train_set, held] = split_heldout(corpus, 200);

  ModelConfig cfg;
  cfg.mode = OutputMode::ctc;
  cfg.decoder_input = DecoderInput::uniform_copy;
  auto m = create_model(corpus.vocab, cfg, 1);
  TrainConfig tc;
  tc.max_steps = 5000;
  tc.glancing = true;
  tc.seed = 1;
  train(m, train_set, tc);

  const auto r = evaluate(m, held);
  MESSAGE("held-out exact match " << r.exact_match);
  CHECK(r.exact_match >= 0.95);
}
