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

#include "natkit/error.hpp"
#include "natkit/model.hpp"
#include "natkit/rng.hpp"

namespace natkit::model {

void ModelConfig::validate() const {
  if (d_model < 1) throw InvalidArgument("d_model must be positive");
  if (enc_layers < 0) throw InvalidArgument("enc_layers must be >= 0");
  if (dec_layers < 1) throw InvalidArgument("dec_layers must be >= 1");
  if (!(dropout >= 0.0 && dropout <= 0.5)) throw InvalidArgument("dropout must lie in [0, 0.5]");
  if (!dec_self_attention.empty() && static_cast<int>(dec_self_attention.size()) != dec_layers)
    throw InvalidArgument("dec_self_attention needs one flag per decoder layer");
  if (mode == OutputMode::ctc && upsample < 1) throw InvalidArgument("CTC mode needs upsample >= 1");
  if (length_bound < 1) throw InvalidArgument("length_bound must be positive");
  if (max_positions < 1) throw InvalidArgument("max_positions must be positive");
  if (vocab_size < 1) throw InvalidArgument("vocab_size not set");
  for (int id : {unk_id, blank_id, bos_id, eos_id})
    if (id < 0 || id >= vocab_size) throw InvalidArgument("special id outside vocabulary");
}

bool ModelConfig::self_attention(int layer) const {
  if (mode == OutputMode::autoregressive) return true;
  return dec_self_attention.empty() || dec_self_attention[static_cast<std::size_t>(layer)];
}

int ModelConfig::decoder_length(int source_len) const {
  if (source_len < 1) throw InvalidArgument("empty source");
  return source_len * upsample;
}

ModelConfig config_for(const Vocabulary& vocab, ModelConfig base) {
  base.vocab_size = vocab.size();
  if (vocab.unk() < 0 || vocab.blank() < 0 || vocab.bos() < 0 || vocab.eos() < 0)
    throw InvalidArgument("model vocabulary needs <unk>, <blank>, <bos> and <eos>");
  base.unk_id = vocab.unk();
  base.blank_id = vocab.blank();
  base.bos_id = vocab.bos();
  base.eos_id = vocab.eos();
  return base;
}

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "gelu"; }
std::string to_string(Init i) {
  return i == Init::scaled_normal ? "scaled_normal" : "fan_in_uniform";
}
std::string to_string(DecoderInput d) {
  switch (d) {
    case DecoderInput::unk: return "unk";
    case DecoderInput::uniform_copy: return "uniform_copy";
    case DecoderInput::soft_copy: return "soft_copy";
  }
  return "unk";
}
std::string to_string(OutputMode m) {
  switch (m) {
    case OutputMode::ctc: return "ctc";
    case OutputMode::length: return "length";
    case OutputMode::autoregressive: return "autoregressive";
  }
  return "ctc";
}

Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "gelu") return Activation::gelu;
  throw InvalidArgument("unknown activation '" + s + "'");
}
Init parse_init(const std::string& s) {
  if (s == "scaled_normal" || s == "bert") return Init::scaled_normal;
  if (s == "fan_in_uniform") return Init::fan_in_uniform;
  throw InvalidArgument("unknown init '" + s + "'");
}
DecoderInput parse_decoder_input(const std::string& s) {
  if (s == "unk") return DecoderInput::unk;
  if (s == "uniform_copy") return DecoderInput::uniform_copy;
  if (s == "soft_copy") return DecoderInput::soft_copy;
  throw InvalidArgument("unknown decoder input '" + s + "'");
}
OutputMode parse_output_mode(const std::string& s) {
  if (s == "ctc") return OutputMode::ctc;
  if (s == "length") return OutputMode::length;
  if (s == "autoregressive" || s == "at") return OutputMode::autoregressive;
  throw InvalidArgument("unknown mode '" + s + "'");
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  z.for_each([](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const std::string&, const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  for_each([&](const std::string&, const Matrix& m) { ok = ok && m.allFinite(); });
  return ok;
}

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  const int d = config.d_model;
  ModelParams p;
  p.embed = Matrix(config.vocab_size, d);
  p.out_bias = Matrix::Zero(1, config.vocab_size);
  p.enc_pos = Matrix(config.max_positions, d);
  p.dec_pos = Matrix(config.max_positions, d);
  for (int l = 0; l < config.enc_layers; ++l) p.encoder.push_back({Matrix(d, d), Matrix::Zero(1, d)});
  for (int l = 0; l < config.dec_layers; ++l) {
    DecoderLayerParams layer;
    if (config.self_attention(l)) layer.self = AttentionParams{Matrix(d, d), Matrix(d, d), Matrix(d, d)};
    layer.cross = AttentionParams{Matrix(d, d), Matrix(d, d), Matrix(d, d)};
    layer.w = Matrix(d, d);
    layer.b = Matrix::Zero(1, d);
    p.decoder.push_back(std::move(layer));
  }
  p.len_w = Matrix(d, config.length_classes());
  p.len_b = Matrix::Zero(1, config.length_classes());
  p.tau = Matrix::Constant(1, 1, 1.0);

  Rng rng(seed);
  p.for_each([&](const std::string& name, Matrix& m) {
    const bool is_bias = name == "out_bias" || name == "len_b" || name == "tau" ||
                         (name.size() > 2 && name.compare(name.size() - 2, 2, ".b") == 0);
    if (is_bias) return;
    // Embedding-like tables are indexed by row, so their fan-in is the width.
    const bool table = name == "embed" || name == "enc_pos" || name == "dec_pos";
    const double fan_in = static_cast<double>(table ? m.cols() : m.rows());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (config.init == Init::scaled_normal) {
        m.data()[i] = 0.02 * rng.normal();
      } else {
        const double bound = 1.0 / std::sqrt(fan_in);
        m.data()[i] = rng.uniform(-bound, bound);
      }
    }
  });
  return p;
}

ModelParams average_params(std::span<const ModelParams> checkpoints) {
  if (checkpoints.empty()) throw InvalidArgument("average_params: no checkpoints");
  std::vector<std::pair<std::string, Matrix*>> acc;
  ModelParams mean = checkpoints.front().zeros_like();
  mean.for_each([&](const std::string& name, Matrix& m) { acc.emplace_back(name, &m); });
  for (const auto& ckpt : checkpoints) {
    std::size_t i = 0;
    ckpt.for_each([&](const std::string& name, const Matrix& m) {
      if (i >= acc.size() || acc[i].first != name || acc[i].second->rows() != m.rows() ||
          acc[i].second->cols() != m.cols())
        throw InvalidArgument("average_params: shape mismatch at '" + name + "'");
      *acc[i].second += m;
      ++i;
    });
    if (i != acc.size()) throw InvalidArgument("average_params: tensor count mismatch");
  }
  const double k = static_cast<double>(checkpoints.size());
  mean.for_each([&](const std::string&, Matrix& m) { m /= k; });
  return mean;
}

Model create_model(const Vocabulary& vocab, ModelConfig config, std::uint64_t seed) {
  Model model;
  model.config = config_for(vocab, std::move(config));
  model.vocab = vocab;
  model.params = init_params(model.config, seed);
  return model;
}

}  // namespace natkit::model
