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
#include <string>

#include "natkit/ctc.hpp"
#include "natkit/error.hpp"
#include "natkit/model.hpp"

namespace natkit::model {

std::vector<int> decode(const Model& model, std::span<const int> source, ForwardCounter* counter,
                        std::optional<int> forced_length) {
  const auto& cfg = model.config;
  if (cfg.mode == OutputMode::autoregressive) return decode_at(model, source, counter);
  if (forced_length && *forced_length < 0) throw InvalidArgument("forced length must be >= 0");
  const auto J = static_cast<int>(source.size());

  if (cfg.mode == OutputMode::ctc) {
    const int T = forced_length ? *forced_length : cfg.decoder_length(J);
    if (T == 0) return {};
    const auto pass = forward(model.params, cfg, source, T);
    if (counter) ++counter->passes;
    return ctc::greedy_decode(ctc::LogProbTable::from_logits(pass.states.logits.back()), cfg.blank_id);
  }

  auto enc = encode(model.params, cfg, source);
  int I = forced_length ? *forced_length
                        : predict_length(enc.length_logits, J, cfg.length_bound, cfg.length_offset);
  I = std::min(I, cfg.max_positions);
  if (counter) ++counter->passes;
  if (I == 0) return {};
  const auto pass = decode_pass(model.params, cfg, std::move(enc), I);
  const Matrix& logits = pass.states.logits.back();
  std::vector<int> out(static_cast<std::size_t>(I));
  for (int i = 0; i < I; ++i) out[static_cast<std::size_t>(i)] = argmax_row(logits, i);
  return out;
}

std::vector<int> decode_at(const Model& model, std::span<const int> source, ForwardCounter* counter) {
  const auto& cfg = model.config;
  if (cfg.mode != OutputMode::autoregressive)
    throw InvalidArgument("decode_at needs an autoregressive model");
  const auto enc = encode(model.params, cfg, source);
  const auto J = static_cast<std::size_t>(source.size());
  const std::size_t limit = std::min<std::size_t>(2 * J + 8, static_cast<std::size_t>(cfg.max_positions) - 1);
  std::vector<int> inputs{cfg.bos_id};
  std::vector<int> out;
  ForwardOptions opts;
  for (;;) {
    opts.input_tokens = inputs;
    const auto pass = decode_pass(model.params, cfg, enc, static_cast<int>(inputs.size()), opts);
    if (counter) ++counter->passes;
    const Matrix& logits = pass.states.logits.back();
    const int next = argmax_row(logits, logits.rows() - 1);
    if (next == cfg.eos_id || out.size() >= limit) break;
    out.push_back(next);
    inputs.push_back(next);
  }
  return out;
}

std::vector<int> decode_any(const Model& model, std::span<const int> source, ForwardCounter* counter) {
  if (model.config.mode == OutputMode::autoregressive) return decode_at(model, source, counter);
  return decode(model, source, counter);
}

double repetition_rate(std::span<const std::vector<int>> hypotheses) {
  std::size_t pairs = 0, repeats = 0;
  for (const auto& h : hypotheses) {
    for (std::size_t i = 1; i < h.size(); ++i) {
      ++pairs;
      if (h[i] == h[i - 1]) ++repeats;
    }
  }
  return pairs == 0 ? 0.0 : static_cast<double>(repeats) / static_cast<double>(pairs);
}

EvalResult evaluate(const Model& model, const ParallelCorpus& corpus) {
  EvalResult out;
  if (corpus.pairs.empty()) return out;
  std::size_t exact = 0, tokens = 0;
  for (const auto& pair : corpus.pairs) {
    auto hyp = decode_any(model, pair.source.ids);
    if (hyp == pair.target.ids) ++exact;
    tokens += hyp.size();
    out.hypotheses.push_back(std::move(hyp));
  }
  const auto n = static_cast<double>(corpus.pairs.size());
  out.exact_match = static_cast<double>(exact) / n;
  out.mean_length = static_cast<double>(tokens) / n;
  out.repetition_rate = repetition_rate(out.hypotheses);
  return out;
}

double validation_loss(const Model& model, const ParallelCorpus& corpus) {
  if (corpus.pairs.empty()) throw InvalidArgument("validation_loss: empty corpus");
  const auto& cfg = model.config;
  double total = 0.0;
  for (const auto& pair : corpus.pairs) {
    const auto& src = pair.source.ids;
    const auto& tgt = pair.target.ids;
    if (cfg.mode == OutputMode::autoregressive) {
      std::vector<int> inputs{cfg.bos_id};
      inputs.insert(inputs.end(), tgt.begin(), tgt.end());
      std::vector<int> outputs(tgt.begin(), tgt.end());
      outputs.push_back(cfg.eos_id);
      ForwardOptions opts;
      opts.input_tokens = inputs;
      const auto pass = forward(model.params, cfg, src, static_cast<int>(inputs.size()), opts);
      total += token_nll(pass.states.logits.back(), outputs).value;
    } else if (cfg.mode == OutputMode::ctc) {
      const auto pass = forward(model.params, cfg, src, cfg.decoder_length(static_cast<int>(src.size())));
      total += token_ctc(pass.states.logits.back(), tgt, cfg.blank_id).value;
    } else {
      const auto pass = forward(model.params, cfg, src, static_cast<int>(tgt.size()));
      total += token_nll(pass.states.logits.back(), tgt).value;
    }
  }
  return total / static_cast<double>(corpus.pairs.size());
}

}  // namespace natkit::model
