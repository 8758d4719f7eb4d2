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

#include <cmath>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "natkit/corpus.hpp"
#include "natkit/error.hpp"
#include "natkit/model.hpp"
#include "natkit/rng.hpp"
#include "test_support.hpp"

using namespace natkit;
using namespace natkit::model;
using natkit::testing::fd_check;
using natkit::testing::kFdTolerance;
using natkit::testing::random_matrix;

namespace {

constexpr int kInstances = 20;

LayerStates random_states(Rng& rng, int layers, int rows, int vocab) {
  LayerStates s;
  for (int l = 0; l < layers; ++l) s.logits.push_back(random_matrix(rng, rows, vocab));
  return s;
}

std::vector<int> random_ids(Rng& rng, int n, int lo, int hi) {
  std::vector<int> out(static_cast<std::size_t>(n));
  for (auto& x : out) x = static_cast<int>(rng.uniform_int(lo, hi));
  return out;
}

ParallelCorpus tiny_corpus(std::size_t n, int modes = 1, std::uint64_t seed = 3) {
  SynthOptions o;
  o.n_pairs = n;
  o.min_len = 2;
  o.max_len = 4;
  o.modes = modes;
  o.n_content = 6;
  o.seed = seed;
  return synth_task(o);
}

ModelConfig micro_config(OutputMode mode) {
  ModelConfig c;
  c.d_model = 6;
  c.enc_layers = 1;
  c.dec_layers = 2;
  c.activation = Activation::gelu;
  c.mode = mode;
  c.length_bound = 4;
  c.max_positions = 16;
  return c;
}

// Max relative error of batch_gradient against central differences over
// every parameter.
double model_fd_error(const Model& m, std::span<const SentencePair> batch, TrainConfig train) {
  const glancing::GlanceSchedule sched{0.5, 0.2, 0, 10};
  auto params = m.params;
  const auto bg = batch_gradient(params, m.config, batch, train, sched, 77);
  std::vector<Matrix*> ps;
  std::vector<const Matrix*> gs;
  params.for_each([&](const std::string&, Matrix& t) { ps.push_back(&t); });
  bg.grads.for_each([&](const std::string&, const Matrix& t) { gs.push_back(&t); });
  double worst = 0.0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    worst = std::max(worst, fd_check(*ps[k], *gs[k], [&] {
      return batch_gradient(params, m.config, batch, train, sched, 77).record.loss;
    }));
  }
  return worst;
}

}  // namespace

TEST_CASE("position-wise NLL values") {
  LayerStates s;
  s.logits.push_back(Matrix::Zero(3, 4));
  const std::vector target{0, 1, 2};
  CHECK(loss_nat(s, target).value == doctest::Approx(std::log(4.0)));

  Rng rng(1);
  s.logits[0] = random_matrix(rng, 3, 4);
  glancing::GlanceMask mask;
  mask.positions = {0, 2};
  mask.revealed = {0, 2};
  const double only = -log_softmax_rows(s.logits[0])(1, 1);
  CHECK(loss_nat(s, target, &mask).value == doctest::Approx(only));
  mask.positions = {0, 1, 2};
  mask.revealed = {0, 1, 2};
  CHECK_THROWS_AS(loss_nat(s, target, &mask), InvalidArgument);
  CHECK_THROWS_AS(loss_nat(s, std::vector{0, 1}), InvalidArgument);
}

TEST_CASE("NLL gradient matches finite differences") {
  Rng rng(101);
  double worst = 0;
  for (int n = 0; n < kInstances; ++n) {
    const int rows = static_cast<int>(rng.uniform_int(1, 6));
    const int vocab = static_cast<int>(rng.uniform_int(2, 6));
    auto s = random_states(rng, 2, rows, vocab);
    const auto target = random_ids(rng, rows, 0, vocab - 1);
    glancing::GlanceMask mask;
    if (n % 2 == 1 && rows > 1) mask = glancing::sample_glance(target, static_cast<std::size_t>(rows / 2), n);
    const auto* mp = mask.empty() ? nullptr : &mask;
    const auto r = loss_nat(s, target, mp);
    CHECK(r.dlogits.size() == 2);
    CHECK(r.dlogits[0].size() == 0);
    worst = std::max(worst, fd_check(s.logits[1], r.dlogits[1], [&] { return loss_nat(s, target, mp).value; }));
  }
  CHECK(worst <= kFdTolerance);
}

TEST_CASE("CTC loss values") {
  LayerStates s;
  Matrix certain = Matrix::Constant(1, 3, -40.0);
  certain(0, 2) = 40.0;
  s.logits.push_back(certain);
  CHECK(loss_ctc(s, std::vector{2}, 0).value == doctest::Approx(0.0));
  s.logits[0] = Matrix::Zero(2, 2);
  CHECK(loss_ctc(s, std::vector{1}, 0).value == doctest::Approx(-std::log(0.75)));
  CHECK_THROWS_AS(loss_ctc(s, std::vector{1, 1}, 0), InfeasibleTarget);
}

TEST_CASE("CTC loss gradient matches finite differences") {
  Rng rng(103);
  double worst = 0;
  int n = 0;
  while (n < kInstances) {
    const int rows = static_cast<int>(rng.uniform_int(1, 8));
    const int vocab = static_cast<int>(rng.uniform_int(2, 5));
    const auto target = random_ids(rng, static_cast<int>(rng.uniform_int(1, rows)), 1, vocab - 1);
    if (!ctc::is_feasible(target, rows)) continue;
    auto s = random_states(rng, 1, rows, vocab);
    const auto r = loss_ctc(s, target, 0);
    worst = std::max(worst, fd_check(s.logits[0], r.dlogits[0], [&] { return loss_ctc(s, target, 0).value; }));
    ++n;
  }
  CHECK(worst <= kFdTolerance);
}

TEST_CASE("deep supervision averages layer losses") {
  Rng rng(5);
  auto one = random_states(rng, 1, 4, 5);
  const std::vector target{1, 2, 3, 4};
  const auto base = loss_nat(one, target);
  const auto ds = loss_deep_supervision(one, [&](const Matrix& l) { return token_nll(l, target); });
  CHECK(ds.value == base.value);
  CHECK((ds.dlogits[0].array() == base.dlogits[0].array()).all());

  LayerStates two;
  two.logits = {Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 4.0)};
  const auto mean = loss_deep_supervision(two, [](const Matrix& l) {
    return LogitLoss{l(0, 0), Matrix::Ones(1, 1)};
  });
  CHECK(mean.value == doctest::Approx(3.0));
  CHECK(mean.dlogits[0](0, 0) == doctest::Approx(0.5));
}

TEST_CASE("deep supervision gradient matches finite differences") {
  Rng rng(107);
  double worst = 0;
  int n = 0;
  while (n < kInstances) {
    const int layers = static_cast<int>(rng.uniform_int(1, 3));
    const int rows = static_cast<int>(rng.uniform_int(2, 6));
    const int vocab = static_cast<int>(rng.uniform_int(3, 5));
    auto s = random_states(rng, layers, rows, vocab);
    const bool use_ctc = n % 2 == 0;
    const auto target = use_ctc ? random_ids(rng, rows / 2, 1, vocab - 1) : random_ids(rng, rows, 0, vocab - 1);
    if (use_ctc && !ctc::is_feasible(target, rows)) continue;
    const BaseLoss base = [&](const Matrix& l) {
      return use_ctc ? token_ctc(l, target, 0) : token_nll(l, target);
    };
    const auto r = loss_deep_supervision(s, base);
    for (int l = 0; l < layers; ++l) {
      const double e = fd_check(s.logits[static_cast<std::size_t>(l)], r.dlogits[static_cast<std::size_t>(l)],
                                [&] { return loss_deep_supervision(s, base).value; });
      worst = std::max(worst, e);
      CHECK(r.dlogits[static_cast<std::size_t>(l)].cwiseAbs().maxCoeff() > 0);
    }
    ++n;
  }
  CHECK(worst <= kFdTolerance);
}

TEST_CASE("length loss values and clamping") {
  CHECK(loss_length(Matrix::Zero(1, 65), 7, 5, 32).value == doctest::Approx(std::log(65.0)));
  Matrix hot = Matrix::Constant(1, 65, -50.0);
  hot(0, 32 + 2) = 50.0;
  CHECK(loss_length(hot, 7, 5, 32).value == doctest::Approx(0.0));
  CHECK_FALSE(loss_length(hot, 7, 5, 32).clamped);
  CHECK(loss_length(hot, 80, 5, 32).clamped);
  CHECK(predict_length(hot, 5, 32) == 7);
  Matrix abs_hot = Matrix::Constant(1, 65, 0.0);
  abs_hot(0, 9) = 1.0;
  CHECK(predict_length(abs_hot, 5, 32, false) == 9);
  CHECK(predict_length(Matrix::Zero(1, 65), 5, 32) == 0);
  CHECK_THROWS_AS(loss_length(Matrix::Zero(1, 3), 1, 1, 32), InvalidArgument);
}

TEST_CASE("length loss gradient matches finite differences") {
  Rng rng(109);
  double worst = 0;
  for (int n = 0; n < kInstances; ++n) {
    const int bound = static_cast<int>(rng.uniform_int(1, 8));
    Matrix logits = random_matrix(rng, 1, 2 * bound + 1);
    const int J = static_cast<int>(rng.uniform_int(1, 10));
    const int I = static_cast<int>(rng.uniform_int(std::max(0, J - bound), J + bound));
    const bool offset = n % 3 != 0;
    const auto r = loss_length(logits, I, J, bound, offset);
    worst = std::max(worst, fd_check(logits, r.grad, [&] { return loss_length(logits, I, J, bound, offset).value; }));
  }
  CHECK(worst <= kFdTolerance);
}

TEST_CASE("full model gradient matches finite differences") {
  const auto corpus = tiny_corpus(40);
  TrainConfig train;
  train.length_loss_weight = 0.1;
  struct Variant {
    const char* name;
    OutputMode mode;
    DecoderInput input;
    bool deep;
    double dropout;
  };
  const Variant variants[] = {
      {"ctc", OutputMode::ctc, DecoderInput::unk, false, 0.0},
      {"ctc deep supervision", OutputMode::ctc, DecoderInput::uniform_copy, true, 0.0},
      {"length soft copy", OutputMode::length, DecoderInput::soft_copy, false, 0.0},
      {"length dropout", OutputMode::length, DecoderInput::uniform_copy, true, 0.2},
      {"autoregressive", OutputMode::autoregressive, DecoderInput::unk, false, 0.0},
  };
  for (const auto& v : variants) {
    CAPTURE(v.name);
    auto cfg = micro_config(v.mode);
    cfg.decoder_input = v.input;
    cfg.deep_supervision = v.deep;
    cfg.dropout = v.dropout;
    if (v.mode != OutputMode::autoregressive) cfg.dec_self_attention = {false, true};
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      const auto m = create_model(corpus.vocab, cfg, seed);
      const std::span<const SentencePair> batch(corpus.pairs.data() + seed, 3);
      CHECK(model_fd_error(m, batch, train) <= kFdTolerance);
    }
  }
}

TEST_CASE("forward shapes and determinism") {
  const auto corpus = tiny_corpus(5);
  const auto m = create_model(corpus.vocab, micro_config(OutputMode::ctc), 1);
  const auto& src = corpus.pairs[0].source.ids;
  const auto a = forward(m.params, m.config, src, 7);
  REQUIRE(a.states.logits.size() == 2);
  for (const auto& l : a.states.logits) {
    CHECK(l.rows() == 7);
    CHECK(l.cols() == corpus.vocab.size());
  }
  const auto b = forward(m.params, m.config, src, 7);
  CHECK(a.states.logits.back() == b.states.logits.back());
  CHECK_THROWS_AS(forward(m.params, m.config, src, 0), InvalidArgument);
}

TEST_CASE("without self-attention positions do not interact") {
  const auto corpus = tiny_corpus(5);
  auto cfg = micro_config(OutputMode::length);
  cfg.dec_self_attention = {false, false};
  const auto m = create_model(corpus.vocab, cfg, 2);
  const auto& src = corpus.pairs[0].source.ids;
  std::vector<int> in{5, 6, 7, 8};
  ForwardOptions o;
  o.input_tokens = in;
  const auto a = forward(m.params, m.config, src, 4, o);
  in[1] = 9;
  o.input_tokens = in;
  const auto b = forward(m.params, m.config, src, 4, o);
  const auto& la = a.states.logits.back();
  const auto& lb = b.states.logits.back();
  CHECK(la.row(0) == lb.row(0));
  CHECK(la.row(2) == lb.row(2));
  CHECK(la.row(3) == lb.row(3));
  CHECK(la.row(1) != lb.row(1));
}

TEST_CASE("zero non-embedding weights give identical rows") {
  const auto corpus = tiny_corpus(5);
  auto m = create_model(corpus.vocab, micro_config(OutputMode::ctc), 3);
  m.params.for_each([](const std::string& name, Matrix& t) {
    if (name != "embed" && name != "tau") t.setZero();
  });
  const auto p = forward(m.params, m.config, corpus.pairs[0].source.ids, 5);
  const auto& l = p.states.logits.back();
  for (Eigen::Index r = 1; r < l.rows(); ++r) CHECK(l.row(r) == l.row(0));
}

TEST_CASE("decoder input strategies") {
  Rng rng(4);
  const Matrix src = random_matrix(rng, 4, 3);
  const RowVector unk = random_matrix(rng, 1, 3);
  const Matrix u = decoder_inputs(DecoderInput::unk, src, unk, 6, 1.0);
  for (Eigen::Index r = 0; r < 6; ++r) CHECK(u.row(r) == unk);
  CHECK(decoder_inputs(DecoderInput::uniform_copy, src, unk, 4, 1.0) == src);
  const Matrix up = decoder_inputs(DecoderInput::uniform_copy, src, unk, 8, 1.0);
  CHECK(up.row(5) == src.row(2));
  const Matrix soft = decoder_inputs(DecoderInput::soft_copy, src, unk, 4, 1e-3);
  CHECK((soft - src).cwiseAbs().maxCoeff() < 1e-12);
  const Matrix blur = decoder_inputs(DecoderInput::soft_copy, src, unk, 4, 1.0);
  CHECK((blur - src).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("dropout off: train mode equals eval mode") {
  const auto corpus = tiny_corpus(5);
  const auto m = create_model(corpus.vocab, micro_config(OutputMode::ctc), 5);
  ForwardOptions train;
  train.train = true;
  train.dropout_seed = 9;
  const auto& src = corpus.pairs[1].source.ids;
  CHECK(forward(m.params, m.config, src, 6, train).states.logits.back() ==
        forward(m.params, m.config, src, 6).states.logits.back());
  auto cfg = micro_config(OutputMode::ctc);
  cfg.dropout = 0.3;
  const auto d = create_model(corpus.vocab, cfg, 5);
  CHECK(forward(d.params, d.config, src, 6, train).states.logits.back() !=
        forward(d.params, d.config, src, 6).states.logits.back());
}

TEST_CASE("embeddings are tied") {
  const auto corpus = tiny_corpus(5);
  auto m = create_model(corpus.vocab, micro_config(OutputMode::ctc), 6);
  const auto& src = corpus.pairs[0].source.ids;
  const auto before = forward(m.params, m.config, src, 4).states.logits.back();
  m.params.embed.row(9).array() += 0.5;
  const auto after = forward(m.params, m.config, src, 4).states.logits.back();
  CHECK((after.col(9) - before.col(9)).cwiseAbs().minCoeff() > 0);
}

TEST_CASE("glanced tokens enter the decoder input verbatim") {
  const auto corpus = tiny_corpus(5);
  auto cfg = micro_config(OutputMode::length);
  cfg.decoder_input = DecoderInput::uniform_copy;
  const auto m = create_model(corpus.vocab, cfg, 7);
  const auto& pair = corpus.pairs[2];
  const auto mask = glancing::sample_glance(pair.target.ids, 2, 4);
  ForwardOptions o;
  o.glance = &mask;
  const auto p = forward(m.params, m.config, pair.source.ids, static_cast<int>(pair.target.size()), o);
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const auto row = static_cast<Eigen::Index>(mask.positions[k]);
    CHECK(p.inputs.row(row) == m.params.embed.row(mask.revealed[k]));
    CHECK(p.input_token[mask.positions[k]] == mask.revealed[k]);
  }
}

TEST_CASE("learning rate schedule") {
  TrainConfig t;
  t.lr = 1.0;
  t.warmup = 4;
  CHECK(learning_rate(t, 1) == doctest::Approx(0.25));
  CHECK(learning_rate(t, 4) == doctest::Approx(1.0));
  CHECK(learning_rate(t, 16) == doctest::Approx(0.5));
}

TEST_CASE("train step is deterministic and reduces to vanilla without glancing") {
  const auto corpus = tiny_corpus(20);
  const auto m = create_model(corpus.vocab, micro_config(OutputMode::length), 8);
  TrainConfig t;
  const glancing::GlanceSchedule sched{0.5, 0.2, 0, 10};
  const std::span<const SentencePair> batch(corpus.pairs.data(), 4);
  auto p1 = m.params, p2 = m.params;
  auto a1 = init_adam(p1), a2 = init_adam(p2);
  for (int k = 0; k < 3; ++k) {
    train_step(p1, a1, m.config, batch, t, sched, 5);
    train_step(p2, a2, m.config, batch, t, sched, 5);
  }
  CHECK(p1.embed == p2.embed);

  TrainConfig glat = t;
  glat.glancing = true;
  const glancing::GlanceSchedule zero{0.0, 0.0, 0, 10};
  auto p3 = m.params, p4 = m.params;
  auto a3 = init_adam(p3), a4 = init_adam(p4);
  const auto r3 = train_step(p3, a3, m.config, batch, glat, zero, 5);
  train_step(p4, a4, m.config, batch, t, zero, 5);
  CHECK(r3.glanced == 0);
  CHECK(p3.embed == p4.embed);
}

TEST_CASE("training a single sentence lowers the loss") {
  const auto corpus = tiny_corpus(1);
  auto m = create_model(corpus.vocab, micro_config(OutputMode::ctc), 9);
  TrainConfig t;
  t.max_steps = 200;
  t.batch_size = 1;
  std::vector<double> losses;
  train(m, corpus, t, [&](const StepRecord& r) { losses.push_back(r.loss); });
  REQUIRE(losses.size() == 200);
  std::vector<double> smooth;
  for (std::size_t k = 0; k + 5 <= losses.size(); k += 5) {
    double s = 0;
    for (std::size_t j = k; j < k + 5; ++j) s += losses[j];
    smooth.push_back(s / 5);
  }
  for (std::size_t k = 1; k < smooth.size(); ++k) CHECK(smooth[k] <= smooth[k - 1] + 1e-9);
  CHECK(smooth.back() < 0.1 * smooth.front());
}

TEST_CASE("divergence is reported") {
  const auto corpus = tiny_corpus(10);
  auto m = create_model(corpus.vocab, micro_config(OutputMode::ctc), 10);
  TrainConfig t;
  t.lr = 1e300;
  t.warmup = 1;
  t.max_steps = 5;
  CHECK_THROWS_AS(train(m, corpus, t), TrainingDiverged);
}

TEST_CASE("checkpoint averaging") {
  const auto corpus = tiny_corpus(5);
  const auto a = create_model(corpus.vocab, micro_config(OutputMode::ctc), 11);
  const std::vector<ModelParams> one{a.params};
  CHECK(average_params(one).embed == a.params.embed);

  auto neg = a.params;
  neg.for_each([](const std::string&, Matrix& t) { t = -t; });
  const std::vector<ModelParams> pair{a.params, neg};
  const auto zero = average_params(pair);
  zero.for_each([](const std::string&, const Matrix& t) { CHECK(t.cwiseAbs().maxCoeff() == 0.0); });

  const std::vector<ModelParams> copies(5, a.params);
  const auto avg = average_params(copies);
  CHECK((avg.dec_pos - a.params.dec_pos).cwiseAbs().maxCoeff() < 1e-15);

  auto other = micro_config(OutputMode::ctc);
  other.d_model = 4;
  const std::vector<ModelParams> bad{a.params, create_model(corpus.vocab, other, 1).params};
  CHECK_THROWS_AS(average_params(bad), InvalidArgument);
  CHECK_THROWS_AS(average_params(std::vector<ModelParams>{}), InvalidArgument);
}

TEST_CASE("decoding contracts") {
  const auto corpus = tiny_corpus(5);
  const auto& src = corpus.pairs[0].source.ids;
  const auto ctc_model = create_model(corpus.vocab, micro_config(OutputMode::ctc), 12);
  ForwardCounter c;
  CHECK(decode(ctc_model, src, &c) == decode(create_model(corpus.vocab, micro_config(OutputMode::ctc), 12), src));
  CHECK(c.passes == 1);

  const auto len_model = create_model(corpus.vocab, micro_config(OutputMode::length), 12);
  CHECK(decode(len_model, src, nullptr, 6).size() == 6);
  CHECK(decode(len_model, src, nullptr, 0).empty());

  auto at = create_model(corpus.vocab, micro_config(OutputMode::autoregressive), 12);
  for (const auto& p : corpus.pairs) {
    ForwardCounter k;
    const auto out = decode_at(at, p.source.ids, &k);
    CHECK(k.passes == out.size() + 1);
    CHECK(out.size() <= 2 * p.source.size() + 8);
  }
  at.params.out_bias(0, at.config.eos_id) = 1e6;
  ForwardCounter k;
  CHECK(decode_at(at, src, &k).empty());
  CHECK(k.passes == 1);
  CHECK_THROWS_AS(decode_at(ctc_model, src), InvalidArgument);
}

TEST_CASE("repetition rate") {
  const std::vector<std::vector<int>> h{{1, 1, 2}, {3}, {4, 5}};
  CHECK(repetition_rate(h) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("checkpoint round trip") {
  natkit::testing::TempDir dir("ckpt");
  const auto corpus = tiny_corpus(5);
  auto cfg = micro_config(OutputMode::length);
  cfg.dropout = 0.1;
  cfg.dec_self_attention = {true, false};
  auto m = create_model(corpus.vocab, cfg, 13);
  save_model(m, dir.file("m.ckpt"));
  const auto back = load_model(dir.file("m.ckpt"));
  CHECK(back.vocab == m.vocab);
  CHECK(back.config.dropout == m.config.dropout);
  CHECK(back.config.dec_self_attention == m.config.dec_self_attention);
  std::vector<const Matrix*> a, b;
  m.params.for_each([&](const std::string&, const Matrix& t) { a.push_back(&t); });
  back.params.for_each([&](const std::string&, const Matrix& t) { b.push_back(&t); });
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(*a[k] == *b[k]);
  CHECK_THROWS_AS(load_model(dir.file("missing")), IoError);
  {
    std::ofstream(dir.file("bad")) << "not a checkpoint\n";
  }
  CHECK_THROWS_AS(load_model(dir.file("bad")), FormatError);
}
