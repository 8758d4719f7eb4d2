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

namespace natkit::model {
namespace {

LossResult last_layer(const LayerStates& states, LogitLoss loss) {
  LossResult out;
  out.value = loss.value;
  out.dlogits.resize(states.logits.size());
  out.dlogits.back() = std::move(loss.grad);
  return out;
}

}  // namespace

LogitLoss token_nll(const Matrix& logits, std::span<const int> target,
                    const glancing::GlanceMask* mask) {
  if (static_cast<Eigen::Index>(target.size()) != logits.rows())
    throw InvalidArgument("token_nll: target length must equal the decoder length");
  std::vector<Eigen::Index> rows;
  for (std::size_t i = 0; i < target.size(); ++i)
    if (!mask || !mask->contains(i)) rows.push_back(static_cast<Eigen::Index>(i));
  if (rows.empty()) throw InvalidArgument("token_nll: every position is masked");

  const Matrix logp = log_softmax_rows(logits);
  LogitLoss out;
  out.grad = Matrix::Zero(logits.rows(), logits.cols());
  const double scale = 1.0 / static_cast<double>(rows.size());
  for (auto r : rows) {
    const int y = target[static_cast<std::size_t>(r)];
    if (y < 0 || y >= logits.cols()) throw InvalidArgument("token_nll: target id outside vocabulary");
    out.value -= logp(r, y);
    out.grad.row(r) = logp.row(r).array().exp() * scale;
    out.grad(r, y) -= scale;
  }
  out.value *= scale;
  return out;
}

LogitLoss token_ctc(const Matrix& logits, std::span<const int> target, int blank) {
  const auto table = ctc::LogProbTable::from_logits(logits);
  const auto post = ctc::forward_backward(table, target, blank);
  LogitLoss out;
  out.value = -post.log_likelihood;
  out.grad = table.values.array().exp().matrix() - post.occupancy;
  return out;
}

LossResult loss_nat(const LayerStates& states, std::span<const int> target,
                    const glancing::GlanceMask* mask) {
  if (states.logits.empty()) throw InvalidArgument("loss_nat: no decoder layers");
  return last_layer(states, token_nll(states.logits.back(), target, mask));
}

LossResult loss_ctc(const LayerStates& states, std::span<const int> target, int blank) {
  if (states.logits.empty()) throw InvalidArgument("loss_ctc: no decoder layers");
  return last_layer(states, token_ctc(states.logits.back(), target, blank));
}

LossResult loss_deep_supervision(const LayerStates& states, const BaseLoss& base) {
  if (states.logits.empty()) throw InvalidArgument("loss_deep_supervision: no decoder layers");
  const auto layers = static_cast<double>(states.logits.size());
  LossResult out;
  double total = 0.0;
  for (const auto& logits : states.logits) {
    auto layer = base(logits);
    total += layer.value;
    out.dlogits.push_back(layer.grad / layers);
  }
  out.value = total / layers;
  return out;
}

namespace {

int length_class(int target_len, int source_len, int bound, bool offset, bool& clamped) {
  const int raw = offset ? target_len - source_len + bound : target_len;
  const int cls = std::clamp(raw, 0, 2 * bound);
  clamped = cls != raw;
  return cls;
}

}  // namespace

LengthLoss loss_length(const Matrix& length_logits, int target_len, int source_len,
                       int length_bound, bool offset_classes) {
  if (length_logits.rows() != 1 || length_logits.cols() != 2 * length_bound + 1)
    throw InvalidArgument("loss_length: expected 1 x (2K+1) logits");
  LengthLoss out;
  const int cls = length_class(target_len, source_len, length_bound, offset_classes, out.clamped);
  const Matrix logp = log_softmax_rows(length_logits);
  out.value = -logp(0, cls);
  out.grad = logp.array().exp().matrix();
  out.grad(0, cls) -= 1.0;
  return out;
}

int predict_length(const Matrix& length_logits, int source_len, int length_bound,
                   bool offset_classes) {
  const int cls = argmax_row(length_logits, 0);
  const int len = offset_classes ? source_len + cls - length_bound : cls;
  return std::max(len, 0);
}

}  // namespace natkit::model
