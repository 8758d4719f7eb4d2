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
#include <cmath>
#include <string>

#include "natkit/ctc.hpp"
#include "natkit/error.hpp"
#include "natkit/model.hpp"
#include "natkit/rng.hpp"

namespace natkit::model {

double learning_rate(const TrainConfig& config, std::int64_t step) {
  if (step < 1) throw InvalidArgument("learning_rate: step must be >= 1");
  if (config.warmup <= 0) return config.lr;
  const double u = static_cast<double>(step);
  const double w = static_cast<double>(config.warmup);
  return config.lr * std::min(u / w, std::sqrt(w / u));
}

AdamState init_adam(const ModelParams& params) {
  return {params.zeros_like(), params.zeros_like(), 0};
}

namespace {

struct SentenceLoss {
  double token = 0.0;
  double length = 0.0;
  std::size_t glanced = 0;
  bool clamped = false;
};

LossResult token_loss(const ModelConfig& config, const LayerStates& states,
                      std::span<const int> target, const glancing::GlanceMask* mask) {
  if (config.mode == OutputMode::ctc) {
    if (config.deep_supervision) {
      return loss_deep_supervision(states, [&](const Matrix& logits) {
        return token_ctc(logits, target, config.blank_id);
      });
    }
    return loss_ctc(states, target, config.blank_id);
  }
  if (config.deep_supervision) {
    return loss_deep_supervision(states, [&](const Matrix& logits) {
      return token_nll(logits, target, mask);
    });
  }
  return loss_nat(states, target, mask);
}

void scale_into(std::vector<Matrix>& dlogits, double s) {
  for (auto& m : dlogits)
    if (m.size() > 0) m *= s;
}

SentenceLoss nat_sentence_gradient(const ModelParams& params, const ModelConfig& config,
                                   const SentencePair& pair, const TrainConfig& train,
                                   const glancing::GlanceSchedule& schedule, std::uint64_t seed,
                                   double weight, int T, ForwardOptions opts, ModelParams& grads);

SentenceLoss sentence_gradient(const ModelParams& params, const ModelConfig& config,
                               const SentencePair& pair, const TrainConfig& train,
                               const glancing::GlanceSchedule& schedule, std::uint64_t seed,
                               double weight, ModelParams& grads) {
  const auto& src = pair.source.ids;
  const auto& tgt = pair.target.ids;
  if (src.empty() || tgt.empty()) throw InvalidArgument("training pairs must be non-empty");
  const auto J = static_cast<int>(src.size());
  const auto I = static_cast<int>(tgt.size());
  SentenceLoss out;
  ForwardOptions opts;
  opts.train = true;
  opts.dropout_seed = Rng::mix(seed, 7);

  if (config.mode == OutputMode::autoregressive) {
    std::vector<int> inputs{config.bos_id};
    inputs.insert(inputs.end(), tgt.begin(), tgt.end());
    std::vector<int> outputs(tgt.begin(), tgt.end());
    outputs.push_back(config.eos_id);
    opts.input_tokens = inputs;
    const auto pass = forward(params, config, src, static_cast<int>(inputs.size()), opts);
    auto loss = token_loss(config, pass.states, outputs, nullptr);
    out.token = loss.value;
    scale_into(loss.dlogits, weight);
    backward(params, config, pass, loss.dlogits, Matrix(), grads);
    return out;
  }

  const int T = config.mode == OutputMode::ctc ? config.decoder_length(J) : I;
  if (config.mode == OutputMode::ctc && !ctc::is_feasible(tgt, T))
    throw InfeasibleTarget("target of length " + std::to_string(I) +
                           " cannot be aligned to decoder length " + std::to_string(T));

  try {
    return nat_sentence_gradient(params, config, pair, train, schedule, seed, weight, T, opts, grads);
  } catch (const InfeasibleTarget& e) {
    throw TrainingDiverged(std::string("non-finite CTC loss: ") + e.what());
  }
}

SentenceLoss nat_sentence_gradient(const ModelParams& params, const ModelConfig& config,
                                   const SentencePair& pair, const TrainConfig& train,
                                   const glancing::GlanceSchedule& schedule, std::uint64_t seed,
                                   double weight, int T, ForwardOptions opts, ModelParams& grads) {
  const auto& src = pair.source.ids;
  const auto& tgt = pair.target.ids;
  const auto J = static_cast<int>(src.size());
  const auto I = static_cast<int>(tgt.size());
  SentenceLoss out;
  glancing::GlanceMask mask;
  if (train.glancing) {
    const auto first = forward(params, config, src, T);
    const Matrix& logits = first.states.logits.back();
    const std::uint64_t glance_seed = Rng::mix(seed, 11);
    if (config.mode == OutputMode::ctc) {
      auto g = glancing::glance_inputs_ctc(tgt, ctc::LogProbTable::from_logits(logits), schedule,
                                           glance_seed, config.blank_id);
      mask = std::move(g.mask);
    } else {
      std::vector<int> pred(static_cast<std::size_t>(T));
      for (int i = 0; i < T; ++i) pred[static_cast<std::size_t>(i)] = argmax_row(logits, i);
      const auto count = glancing::glance_count(tgt, pred, glancing::lambda_at(schedule));
      mask = glancing::sample_glance(tgt, count, glance_seed);
    }
    out.glanced = mask.size();
    opts.glance = &mask;
  }

  const auto pass = forward(params, config, src, T, opts);
  const glancing::GlanceMask* exclude = mask.empty() ? nullptr : &mask;
  auto loss = token_loss(config, pass.states, tgt, exclude);
  out.token = loss.value;
  scale_into(loss.dlogits, weight);

  Matrix dlength;
  if (config.mode == OutputMode::length) {
    auto len = loss_length(pass.encoded.length_logits, I, J, config.length_bound, config.length_offset);
    out.length = len.value;
    out.clamped = len.clamped;
    dlength = len.grad * (weight * train.length_loss_weight);
  }
  backward(params, config, pass, loss.dlogits, dlength, grads);
  return out;
}

}  // namespace

BatchGradient batch_gradient(const ModelParams& params, const ModelConfig& config,
                             std::span<const SentencePair> batch, const TrainConfig& train,
                             const glancing::GlanceSchedule& schedule, std::uint64_t seed) {
  if (batch.empty()) throw InvalidArgument("empty batch");
  BatchGradient out;
  out.grads = params.zeros_like();
  const double weight = 1.0 / static_cast<double>(batch.size());
  out.record.lambda = train.glancing ? glancing::lambda_at(schedule) : 0.0;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto s = sentence_gradient(params, config, batch[k], train, schedule, Rng::mix(seed, k),
                                     weight, out.grads);
    out.record.token_loss += s.token * weight;
    out.record.length_loss += s.length * weight;
    out.record.glanced += s.glanced;
    out.record.clamped += s.clamped ? 1 : 0;
  }
  out.record.loss = out.record.token_loss + train.length_loss_weight * out.record.length_loss;
  return out;
}

StepRecord train_step(ModelParams& params, AdamState& adam, const ModelConfig& config,
                      std::span<const SentencePair> batch, const TrainConfig& train,
                      const glancing::GlanceSchedule& schedule, std::uint64_t seed) {
  auto bg = batch_gradient(params, config, batch, train, schedule, seed);
  const std::int64_t step = adam.step + 1;
  if (!std::isfinite(bg.record.loss) || !bg.grads.all_finite())
    throw TrainingDiverged("non-finite loss at step " + std::to_string(step));

  adam.step = step;
  const double lr = learning_rate(train, step);
  const double c1 = 1.0 - std::pow(train.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(train.beta2, static_cast<double>(step));
  std::vector<Matrix*> g, m, v;
  bg.grads.for_each([&](const std::string&, Matrix& t) { g.push_back(&t); });
  adam.m.for_each([&](const std::string&, Matrix& t) { m.push_back(&t); });
  adam.v.for_each([&](const std::string&, Matrix& t) { v.push_back(&t); });
  std::size_t idx = 0;
  params.for_each([&](const std::string&, Matrix& p) {
    const Matrix& gi = *g[idx];
    Matrix& mi = *m[idx];
    Matrix& vi = *v[idx];
    ++idx;
    mi = train.beta1 * mi + (1.0 - train.beta1) * gi;
    vi = train.beta2 * vi + (1.0 - train.beta2) * gi.cwiseProduct(gi);
    p.array() -= lr * (mi.array() / c1) / ((vi.array() / c2).sqrt() + train.adam_eps);
  });
  params.tau(0, 0) = std::max(params.tau(0, 0), 1e-3);
  if (!params.all_finite())
    throw TrainingDiverged("non-finite parameters after step " + std::to_string(step));

  bg.record.step = step;
  bg.record.lr = lr;
  return bg.record;
}

void train(Model& model, const ParallelCorpus& corpus, const TrainConfig& train,
           const StepCallback& on_step) {
  if (corpus.pairs.empty()) throw InvalidArgument("train: empty corpus");
  if (!(corpus.vocab == model.vocab)) throw InvalidArgument("train: corpus vocabulary differs from the model's");
  if (train.batch_size < 1) throw InvalidArgument("train: batch_size must be >= 1");
  if (train.max_steps < 0) throw InvalidArgument("train: max_steps must be >= 0");
  if (!(train.lr > 0.0) || !(train.adam_eps > 0.0)) throw InvalidArgument("train: lr and adam_eps must be > 0");

  auto adam = init_adam(model.params);
  Rng rng(Rng::mix(train.seed, 3));
  const auto n = static_cast<std::int64_t>(corpus.pairs.size());
  std::vector<std::size_t> order(corpus.pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::size_t cursor = order.size();
  std::vector<SentencePair> batch;
  for (std::int64_t step = 0; step < train.max_steps; ++step) {
    batch.clear();
    while (static_cast<int>(batch.size()) < std::min<std::int64_t>(train.batch_size, n)) {
      if (cursor == order.size()) {
        for (std::size_t i = order.size(); i > 1; --i)
          std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
        cursor = 0;
      }
      batch.push_back(corpus.pairs[order[cursor++]]);
    }
    glancing::GlanceSchedule sched{train.lambda_start, train.lambda_slope, step, train.max_steps};
    auto rec = train_step(model.params, adam, model.config, batch, train, sched,
                          Rng::mix(train.seed, static_cast<std::uint64_t>(step) + 1000));
    if (on_step) on_step(rec);
  }
}

}  // namespace natkit::model
