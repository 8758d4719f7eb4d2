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

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "natkit/corpus.hpp"
#include "natkit/glancing.hpp"
#include "natkit/tensor.hpp"

// Micro encoder-decoder with hand-written gradients. The encoder is a stack
// of residual feed-forward blocks; each decoder block is optional
// self-attention, single-head cross-attention and a residual feed-forward
// layer, and every decoder block owns a prediction head through the shared
// embedding matrix.
namespace natkit::model {

enum class Activation { relu, gelu };
enum class Init { scaled_normal, fan_in_uniform };
enum class DecoderInput { unk, uniform_copy, soft_copy };
// ctc: decoder length J*s, CTC loss. length: predicted target length,
// position-wise cross-entropy. autoregressive: causal decoder baseline.
enum class OutputMode { ctc, length, autoregressive };

struct ModelConfig {
  int d_model = 32;
  int enc_layers = 2;
  int dec_layers = 2;
  Activation activation = Activation::relu;
  Init init = Init::fan_in_uniform;
  double dropout = 0.0;
  // Per decoder layer; empty means every layer has self-attention.
  std::vector<bool> dec_self_attention;
  DecoderInput decoder_input = DecoderInput::unk;
  OutputMode mode = OutputMode::ctc;
  int upsample = 2;
  // Length classes cover offsets [-K, K] (or absolute lengths [0, 2K]).
  int length_bound = 32;
  bool length_offset = true;
  bool deep_supervision = false;
  int max_positions = 256;

  // Filled from the vocabulary.
  int vocab_size = 0;
  int unk_id = 0;
  int blank_id = 1;
  int bos_id = 3;
  int eos_id = 4;

  // Throws InvalidArgument.
  void validate() const;
  bool self_attention(int layer) const;
  int length_classes() const { return 2 * length_bound + 1; }
  int decoder_length(int source_len) const;  // ctc mode only
};

ModelConfig config_for(const Vocabulary& vocab, ModelConfig base = {});

std::string to_string(Activation);
std::string to_string(Init);
std::string to_string(DecoderInput);
std::string to_string(OutputMode);
Activation parse_activation(const std::string&);
Init parse_init(const std::string&);
DecoderInput parse_decoder_input(const std::string&);
OutputMode parse_output_mode(const std::string&);

struct AttentionParams {
  Matrix wq, wk, wv;
};

struct EncoderLayerParams {
  Matrix w, b;
};

struct DecoderLayerParams {
  std::optional<AttentionParams> self;
  AttentionParams cross;
  Matrix w, b;
};

struct ModelParams {
  Matrix embed;     // |V| x D, input lookup and output projection
  Matrix out_bias;  // 1 x |V|
  Matrix enc_pos;   // P x D
  Matrix dec_pos;   // P x D
  std::vector<EncoderLayerParams> encoder;
  std::vector<DecoderLayerParams> decoder;
  Matrix len_w;  // D x classes
  Matrix len_b;  // 1 x classes
  Matrix tau;    // 1 x 1 soft-copy temperature

  // f(name, matrix) over every tensor in a fixed order.
  template <class F>
  void for_each(F&& f) {
    visit(*this, f);
  }
  template <class F>
  void for_each(F&& f) const {
    visit(*this, f);
  }

  ModelParams zeros_like() const;
  std::size_t parameter_count() const;
  bool all_finite() const;

 private:
  template <class Self, class F>
  static void visit(Self& p, F& f) {
    f(std::string("embed"), p.embed);
    f(std::string("out_bias"), p.out_bias);
    f(std::string("enc_pos"), p.enc_pos);
    f(std::string("dec_pos"), p.dec_pos);
    for (std::size_t l = 0; l < p.encoder.size(); ++l) {
      const auto pre = "enc." + std::to_string(l) + ".";
      f(pre + "w", p.encoder[l].w);
      f(pre + "b", p.encoder[l].b);
    }
    for (std::size_t l = 0; l < p.decoder.size(); ++l) {
      const auto pre = "dec." + std::to_string(l) + ".";
      auto& layer = p.decoder[l];
      if (layer.self) {
        f(pre + "self.wq", layer.self->wq);
        f(pre + "self.wk", layer.self->wk);
        f(pre + "self.wv", layer.self->wv);
      }
      f(pre + "cross.wq", layer.cross.wq);
      f(pre + "cross.wk", layer.cross.wk);
      f(pre + "cross.wv", layer.cross.wv);
      f(pre + "w", layer.w);
      f(pre + "b", layer.b);
    }
    f(std::string("len_w"), p.len_w);
    f(std::string("len_b"), p.len_b);
    f(std::string("tau"), p.tau);
  }
};

ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

// Element-wise mean. Throws InvalidArgument on an empty list or mismatched
// shapes.
ModelParams average_params(std::span<const ModelParams> checkpoints);

// A model bundle as stored in checkpoints.
struct Model {
  ModelConfig config;
  Vocabulary vocab;
  ModelParams params;
};

Model create_model(const Vocabulary& vocab, ModelConfig config, std::uint64_t seed);

// Decoder input rows before positional embeddings are added.
// unk: every row is the <unk> embedding; uniform_copy: row i copies source
// position floor(i * J / length); soft_copy: row i mixes source rows with
// weights softmax_j(-|i - j| / tau).
Matrix decoder_inputs(DecoderInput strategy, const Matrix& src_embeddings,
                      const RowVector& unk_embedding, int length, double tau);

struct LayerStates {
  std::vector<Matrix> hidden;  // per decoder layer, T x D
  std::vector<Matrix> logits;  // per decoder layer, T x |V|
};

struct ForwardOptions {
  bool train = false;
  std::uint64_t dropout_seed = 0;
  // Glanced positions take the embedding of the revealed token.
  const glancing::GlanceMask* glance = nullptr;
  // Explicit decoder input tokens (teacher forcing, autoregressive
  // decoding); overrides the input strategy.
  std::span<const int> input_tokens = {};
};

struct AttentionCache {
  Matrix q, k, v, attn, out, drop;
};

struct EncoderCache {
  std::vector<Matrix> inputs;  // input to each block
  std::vector<Matrix> pre;     // pre-activation
  std::vector<Matrix> drop;    // dropout scale masks (empty when off)
};

struct DecoderLayerCache {
  Matrix input;
  AttentionCache self;
  Matrix mid;  // after self-attention
  AttentionCache cross;
  Matrix ff_in;  // after cross-attention
  Matrix pre;
  Matrix drop;
};

struct Encoded {
  std::vector<int> source;
  Matrix states;         // J x D
  RowVector pooled;      // 1 x D
  Matrix length_logits;  // 1 x classes
  EncoderCache cache;
};

struct ForwardPass {
  Encoded encoded;
  int decoder_len = 0;
  bool causal = false;
  Matrix inputs;  // T x D decoder input before positions
  // Row provenance for the input gradient: token id, or -1 for rows built
  // by the strategy.
  std::vector<int> input_token;
  Matrix soft_weights;  // T x J, soft_copy only
  std::vector<DecoderLayerCache> layers;
  LayerStates states;
};

Encoded encode(const ModelParams& params, const ModelConfig& config, std::span<const int> source,
               const ForwardOptions& options = {});

// Decoder pass over an existing encoding. decoder_len must be >= 1.
ForwardPass decode_pass(const ModelParams& params, const ModelConfig& config, Encoded encoded,
                        int decoder_len, const ForwardOptions& options = {});

// encode + decode_pass. Throws InvalidArgument when decoder_len < 1.
ForwardPass forward(const ModelParams& params, const ModelConfig& config,
                    std::span<const int> source, int decoder_len,
                    const ForwardOptions& options = {});

// Accumulates parameter gradients into `grads`. `dlogits` holds one matrix
// per decoder layer (empty for layers without a loss); `dlength` may be empty.
void backward(const ModelParams& params, const ModelConfig& config, const ForwardPass& pass,
              std::span<const Matrix> dlogits, const Matrix& dlength, ModelParams& grads);

// Loss over one logits matrix and its gradient.
struct LogitLoss {
  double value = 0.0;
  Matrix grad;
};

struct LossResult {
  double value = 0.0;
  std::vector<Matrix> dlogits;  // per decoder layer
};

using BaseLoss = std::function<LogitLoss(const Matrix& logits)>;

// Mean negative log-likelihood over positions outside `mask`. Throws
// InvalidArgument on length mismatch or when every position is masked.
LogitLoss token_nll(const Matrix& logits, std::span<const int> target,
                    const glancing::GlanceMask* mask = nullptr);
// -log p_ctc(target) of the row-softmaxed logits. Throws InfeasibleTarget.
LogitLoss token_ctc(const Matrix& logits, std::span<const int> target, int blank);

// Last-layer losses.
LossResult loss_nat(const LayerStates& states, std::span<const int> target,
                    const glancing::GlanceMask* mask = nullptr);
LossResult loss_ctc(const LayerStates& states, std::span<const int> target, int blank);
// Mean of `base` applied to every layer's logits.
LossResult loss_deep_supervision(const LayerStates& states, const BaseLoss& base);

struct LengthLoss {
  double value = 0.0;
  Matrix grad;
  bool clamped = false;
};

// Cross-entropy of the length head against the true target length.
// Out-of-range classes are clamped and reported.
LengthLoss loss_length(const Matrix& length_logits, int target_len, int source_len,
                       int length_bound, bool offset_classes = true);

// Predicted target length from the length head, >= 0.
int predict_length(const Matrix& length_logits, int source_len, int length_bound,
                   bool offset_classes = true);

struct TrainConfig {
  double lr = 5e-3;
  int warmup = 100;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double adam_eps = 1e-8;
  std::int64_t max_steps = 1000;
  int batch_size = 16;
  bool glancing = false;
  double lambda_start = 0.5;
  double lambda_slope = 0.2;
  double length_loss_weight = 0.1;
  std::uint64_t seed = 1;
};

// Inverse square root schedule with linear warmup; step counts from 1.
double learning_rate(const TrainConfig& config, std::int64_t step);

struct AdamState {
  ModelParams m, v;
  std::int64_t step = 0;
};

AdamState init_adam(const ModelParams& params);

struct StepRecord {
  std::int64_t step = 0;
  double loss = 0.0;
  double token_loss = 0.0;
  double length_loss = 0.0;
  double lambda = 0.0;
  double lr = 0.0;
  std::size_t glanced = 0;
  std::size_t clamped = 0;
};

// Gradient of the batch loss without an update; exposed for checks.
struct BatchGradient {
  StepRecord record;
  ModelParams grads;
};

BatchGradient batch_gradient(const ModelParams& params, const ModelConfig& config,
                             std::span<const SentencePair> batch, const TrainConfig& train,
                             const glancing::GlanceSchedule& schedule, std::uint64_t seed);

// One optimizer update. With glancing on, a first pass predicts, glanced
// tokens are revealed, and the loss is taken on the second pass. Throws
// TrainingDiverged on a non-finite loss or parameter.
StepRecord train_step(ModelParams& params, AdamState& adam, const ModelConfig& config,
                      std::span<const SentencePair> batch, const TrainConfig& train,
                      const glancing::GlanceSchedule& schedule, std::uint64_t seed);

using StepCallback = std::function<void(const StepRecord&)>;

// Runs train.max_steps updates over shuffled mini-batches.
void train(Model& model, const ParallelCorpus& corpus, const TrainConfig& train,
           const StepCallback& on_step = {});

struct ForwardCounter {
  std::size_t passes = 0;
};

// Single-pass non-autoregressive decoding: greedy CTC collapse, or argmax
// length followed by per-position argmax. `forced_length` bypasses the
// length head.
std::vector<int> decode(const Model& model, std::span<const int> source,
                        ForwardCounter* counter = nullptr,
                        std::optional<int> forced_length = std::nullopt);

// Greedy left-to-right decoding, one decoder pass per emitted token plus
// the pass that produces <eos> (or hits the 2J+8 cap).
std::vector<int> decode_at(const Model& model, std::span<const int> source,
                           ForwardCounter* counter = nullptr);

// Dispatches on the model's output mode.
std::vector<int> decode_any(const Model& model, std::span<const int> source,
                            ForwardCounter* counter = nullptr);

struct EvalResult {
  double exact_match = 0.0;
  double repetition_rate = 0.0;  // adjacent identical tokens per adjacent pair
  double mean_length = 0.0;
  std::vector<std::vector<int>> hypotheses;
};

EvalResult evaluate(const Model& model, const ParallelCorpus& corpus);
double repetition_rate(std::span<const std::vector<int>> hypotheses);

// Mean per-sentence training loss (no glancing, no dropout).
double validation_loss(const Model& model, const ParallelCorpus& corpus);

// Text checkpoint: config lines, vocabulary, then tensors as hex floats.
// Throws IoError/FormatError.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace natkit::model
