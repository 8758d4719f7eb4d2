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
#include <string>

#include "natkit/error.hpp"
#include "natkit/model.hpp"
#include "natkit/rng.hpp"

namespace natkit::model {
namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

Matrix activate(const Matrix& z, Activation act) {
  if (act == Activation::relu) return z.cwiseMax(0.0);
  return z.unaryExpr([](double x) {
    return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
  });
}

Matrix activate_grad(const Matrix& z, Activation act) {
  if (act == Activation::relu) return z.unaryExpr([](double x) { return x > 0.0 ? 1.0 : 0.0; });
  return z.unaryExpr([](double x) {
    const double t = std::tanh(kGeluC * (x + kGeluA * x * x * x));
    return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * x * x);
  });
}

// Inverted-dropout scale mask, or an empty matrix when dropout is off.
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, bool train, Rng& rng) {
  if (!train || p <= 0.0) return {};
  Matrix m(rows, cols);
  const double keep = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.bernoulli(p) ? 0.0 : keep;
  return m;
}

Matrix apply_mask(const Matrix& x, const Matrix& mask) {
  return mask.size() == 0 ? x : Matrix(x.cwiseProduct(mask));
}

Matrix gather_rows(const Matrix& table, std::span<const int> ids) {
  Matrix out(static_cast<Eigen::Index>(ids.size()), table.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = table.row(ids[i]);
  return out;
}

AttentionCache attend(const Matrix& xq, const Matrix& xkv, const AttentionParams& w, bool causal,
                      double p_drop, bool train, Rng& rng) {
  AttentionCache c;
  c.q = xq * w.wq;
  c.k = xkv * w.wk;
  c.v = xkv * w.wv;
  Matrix scores = (c.q * c.k.transpose()) / std::sqrt(static_cast<double>(w.wq.cols()));
  if (causal) {
    for (Eigen::Index i = 0; i < scores.rows(); ++i)
      for (Eigen::Index j = i + 1; j < scores.cols(); ++j) scores(i, j) = kNegInf;
  }
  c.attn = softmax_rows(scores);
  c.out = c.attn * c.v;
  c.drop = dropout_mask(c.out.rows(), c.out.cols(), p_drop, train, rng);
  return c;
}

// dout is the gradient w.r.t. the attention output before dropout.
void attend_backward(const AttentionCache& c, const Matrix& xq, const Matrix& xkv,
                     const AttentionParams& w, AttentionParams& g, const Matrix& dout,
                     Matrix& dxq, Matrix& dxkv) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(w.wq.cols()));
  const Matrix dattn = dout * c.v.transpose();
  const Matrix dv = c.attn.transpose() * dout;
  Matrix dscores = c.attn.cwiseProduct(dattn);
  const Eigen::VectorXd row_dot = dscores.rowwise().sum();
  dscores -= c.attn.cwiseProduct(row_dot.replicate(1, c.attn.cols()));
  const Matrix dq = dscores * c.k * scale;
  const Matrix dk = dscores.transpose() * c.q * scale;
  g.wq += xq.transpose() * dq;
  g.wk += xkv.transpose() * dk;
  g.wv += xkv.transpose() * dv;
  dxq += dq * w.wq.transpose();
  dxkv += dk * w.wk.transpose() + dv * w.wv.transpose();
}

Matrix soft_copy_weights(int length, int source_len, double tau) {
  Matrix logits(length, source_len);
  for (int i = 0; i < length; ++i)
    for (int j = 0; j < source_len; ++j) logits(i, j) = -std::abs(i - j) / tau;
  return softmax_rows(logits);
}

}  // namespace

Matrix decoder_inputs(DecoderInput strategy, const Matrix& src_embeddings,
                      const RowVector& unk_embedding, int length, double tau) {
  if (length < 1) throw InvalidArgument("decoder_inputs: length must be >= 1");
  const auto J = static_cast<int>(src_embeddings.rows());
  if (strategy != DecoderInput::unk && J < 1) throw InvalidArgument("decoder_inputs: empty source");
  Matrix out(length, unk_embedding.cols());
  switch (strategy) {
    case DecoderInput::unk:
      out = unk_embedding.replicate(length, 1);
      break;
    case DecoderInput::uniform_copy:
      for (int i = 0; i < length; ++i) {
        const auto j = static_cast<Eigen::Index>((static_cast<long long>(i) * J) / length);
        out.row(i) = src_embeddings.row(j);
      }
      break;
    case DecoderInput::soft_copy:
      if (!(tau > 0.0)) throw InvalidArgument("decoder_inputs: soft_copy needs tau > 0");
      out = soft_copy_weights(length, J, tau) * src_embeddings;
      break;
  }
  return out;
}

Encoded encode(const ModelParams& params, const ModelConfig& config, std::span<const int> source,
               const ForwardOptions& options) {
  const auto J = static_cast<int>(source.size());
  if (J < 1) throw InvalidArgument("encode: empty source");
  if (J > config.max_positions)
    throw InvalidArgument("encode: source length " + std::to_string(J) + " exceeds max_positions");
  for (int id : source)
    if (id < 0 || id >= config.vocab_size) throw InvalidArgument("encode: source id outside vocabulary");

  Rng rng(Rng::mix(options.dropout_seed, 1));
  Encoded enc;
  enc.source.assign(source.begin(), source.end());
  Matrix x = gather_rows(params.embed, source) + params.enc_pos.topRows(J);
  for (const auto& layer : params.encoder) {
    enc.cache.inputs.push_back(x);
    Matrix z = x * layer.w;
    z.rowwise() += layer.b.row(0);
    Matrix mask = dropout_mask(z.rows(), z.cols(), config.dropout, options.train, rng);
    x += apply_mask(activate(z, config.activation), mask);
    enc.cache.pre.push_back(std::move(z));
    enc.cache.drop.push_back(std::move(mask));
  }
  enc.states = std::move(x);
  enc.pooled = enc.states.colwise().mean();
  enc.length_logits = enc.pooled * params.len_w + params.len_b;
  return enc;
}

ForwardPass decode_pass(const ModelParams& params, const ModelConfig& config, Encoded encoded,
                        int decoder_len, const ForwardOptions& options) {
  if (decoder_len < 1) throw InvalidArgument("decoder length must be >= 1");
  if (decoder_len > config.max_positions) {
    throw InvalidArgument("decoder length " + std::to_string(decoder_len) +
                          " exceeds max_positions " + std::to_string(config.max_positions));
  }
  ForwardPass pass;
  pass.encoded = std::move(encoded);
  pass.decoder_len = decoder_len;
  pass.causal = config.mode == OutputMode::autoregressive;
  const auto& source = pass.encoded.source;
  const auto T = static_cast<Eigen::Index>(decoder_len);

  if (!options.input_tokens.empty()) {
    if (static_cast<int>(options.input_tokens.size()) != decoder_len)
      throw InvalidArgument("decoder input tokens must match the decoder length");
    pass.inputs = gather_rows(params.embed, options.input_tokens);
    pass.input_token.assign(options.input_tokens.begin(), options.input_tokens.end());
  } else {
    const Matrix src_emb = gather_rows(params.embed, source);
    const double tau = params.tau(0, 0);
    pass.inputs = decoder_inputs(config.decoder_input, src_emb, params.embed.row(config.unk_id),
                                 decoder_len, tau);
    if (config.decoder_input == DecoderInput::soft_copy)
      pass.soft_weights = soft_copy_weights(decoder_len, static_cast<int>(source.size()), tau);
    pass.input_token.assign(static_cast<std::size_t>(decoder_len), -1);
  }
  if (options.glance) {
    const auto& g = *options.glance;
    for (std::size_t k = 0; k < g.positions.size(); ++k) {
      const auto p = g.positions[k];
      if (p >= static_cast<std::size_t>(decoder_len)) throw InvalidArgument("glance position out of range");
      pass.inputs.row(static_cast<Eigen::Index>(p)) = params.embed.row(g.revealed[k]);
      pass.input_token[p] = g.revealed[k];
    }
  }

  Rng rng(Rng::mix(options.dropout_seed, 2));
  const double p = config.dropout;
  Matrix y = pass.inputs + params.dec_pos.topRows(T);
  for (const auto& layer : params.decoder) {
    DecoderLayerCache c;
    c.input = y;
    if (layer.self) {
      c.self = attend(y, y, *layer.self, pass.causal, p, options.train, rng);
      y += apply_mask(c.self.out, c.self.drop);
    }
    c.mid = y;
    c.cross = attend(y, pass.encoded.states, layer.cross, false, p, options.train, rng);
    y += apply_mask(c.cross.out, c.cross.drop);
    c.ff_in = y;
    c.pre = y * layer.w;
    c.pre.rowwise() += layer.b.row(0);
    c.drop = dropout_mask(c.pre.rows(), c.pre.cols(), p, options.train, rng);
    y += apply_mask(activate(c.pre, config.activation), c.drop);
    pass.states.hidden.push_back(y);
    Matrix logits = y * params.embed.transpose();
    logits.rowwise() += params.out_bias.row(0);
    pass.states.logits.push_back(std::move(logits));
    pass.layers.push_back(std::move(c));
  }
  return pass;
}

ForwardPass forward(const ModelParams& params, const ModelConfig& config,
                    std::span<const int> source, int decoder_len, const ForwardOptions& options) {
  if (decoder_len < 1) throw InvalidArgument("decoder length must be >= 1");
  return decode_pass(params, config, encode(params, config, source, options), decoder_len, options);
}

void backward(const ModelParams& params, const ModelConfig& config, const ForwardPass& pass,
              std::span<const Matrix> dlogits, const Matrix& dlength, ModelParams& grads) {
  const auto& enc = pass.encoded;
  const auto J = static_cast<Eigen::Index>(enc.source.size());
  const auto T = static_cast<Eigen::Index>(pass.decoder_len);
  const auto D = static_cast<Eigen::Index>(config.d_model);
  const auto L = pass.layers.size();
  if (dlogits.size() > L) throw InvalidArgument("backward: more logit gradients than layers");

  Matrix dy = Matrix::Zero(T, D);
  Matrix denc = Matrix::Zero(J, D);
  for (std::size_t li = L; li-- > 0;) {
    const auto& c = pass.layers[li];
    const auto& layer = params.decoder[li];
    auto& g = grads.decoder[li];
    if (li < dlogits.size() && dlogits[li].size() > 0) {
      dy += dlogits[li] * params.embed;
      grads.embed += dlogits[li].transpose() * pass.states.hidden[li];
      grads.out_bias += dlogits[li].colwise().sum();
    }
    const Matrix dz = apply_mask(dy, c.drop).cwiseProduct(activate_grad(c.pre, config.activation));
    g.w += c.ff_in.transpose() * dz;
    g.b += dz.colwise().sum();
    dy += dz * layer.w.transpose();

    Matrix dmid = dy;
    attend_backward(c.cross, c.mid, enc.states, layer.cross, g.cross, apply_mask(dy, c.cross.drop),
                    dmid, denc);
    dy = std::move(dmid);

    if (layer.self) {
      Matrix dxq = dy, dxkv = Matrix::Zero(T, D);
      attend_backward(c.self, c.input, c.input, *layer.self, *g.self, apply_mask(dy, c.self.drop),
                      dxq, dxkv);
      dy = dxq + dxkv;
    }
  }

  grads.dec_pos.topRows(T) += dy;
  const double tau = params.tau(0, 0);
  for (Eigen::Index i = 0; i < T; ++i) {
    const int tok = pass.input_token[static_cast<std::size_t>(i)];
    if (tok >= 0) {
      grads.embed.row(tok) += dy.row(i);
      continue;
    }
    switch (config.decoder_input) {
      case DecoderInput::unk:
        grads.embed.row(config.unk_id) += dy.row(i);
        break;
      case DecoderInput::uniform_copy: {
        const auto j = (i * J) / T;
        grads.embed.row(enc.source[static_cast<std::size_t>(j)]) += dy.row(i);
        break;
      }
      case DecoderInput::soft_copy: {
        Eigen::VectorXd dw(J);
        for (Eigen::Index j = 0; j < J; ++j) {
          const int src = enc.source[static_cast<std::size_t>(j)];
          grads.embed.row(src) += pass.soft_weights(i, j) * dy.row(i);
          dw(j) = dy.row(i).dot(params.embed.row(src));
        }
        const double mean = pass.soft_weights.row(i).dot(dw.transpose());
        for (Eigen::Index j = 0; j < J; ++j) {
          const double dlogit = pass.soft_weights(i, j) * (dw(j) - mean);
          grads.tau(0, 0) += dlogit * static_cast<double>(std::abs(i - j)) / (tau * tau);
        }
        break;
      }
    }
  }

  if (dlength.size() > 0) {
    grads.len_w += enc.pooled.transpose() * dlength;
    grads.len_b += dlength;
    const RowVector dpooled = dlength * params.len_w.transpose();
    denc.rowwise() += dpooled / static_cast<double>(J);
  }

  for (std::size_t li = params.encoder.size(); li-- > 0;) {
    const auto& layer = params.encoder[li];
    const Matrix dz =
        apply_mask(denc, enc.cache.drop[li]).cwiseProduct(activate_grad(enc.cache.pre[li], config.activation));
    grads.encoder[li].w += enc.cache.inputs[li].transpose() * dz;
    grads.encoder[li].b += dz.colwise().sum();
    denc += dz * layer.w.transpose();
  }
  grads.enc_pos.topRows(J) += denc;
  for (Eigen::Index j = 0; j < J; ++j) grads.embed.row(enc.source[static_cast<std::size_t>(j)]) += denc.row(j);
}

}  // namespace natkit::model
