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
#include <fstream>
#include <map>
#include <set>

#include "natkit/corpus.hpp"
#include "natkit/error.hpp"

namespace natkit {

std::vector<std::string> default_specials() {
  return {std::string(kUnkToken), std::string(kBlankToken), std::string(kPadToken),
          std::string(kBosToken), std::string(kEosToken)};
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  index_.reserve(tokens_.size());
  for (int i = 0; i < size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second)
      throw InvalidArgument("duplicate vocabulary token '" + tokens_[i] + "'");
  }
  auto id_of = [&](std::string_view t) {
    auto it = index_.find(std::string(t));
    return it == index_.end() ? -1 : it->second;
  };
  unk_ = id_of(kUnkToken);
  blank_ = id_of(kBlankToken);
  pad_ = id_of(kPadToken);
  bos_ = id_of(kBosToken);
  eos_ = id_of(kEosToken);
}

const std::string& Vocabulary::token(int id) const {
  if (!contains(id)) throw InvalidArgument("token id " + std::to_string(id) + " out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<int> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Vocabulary::is_special(int id) const {
  return id >= 0 && (id == unk_ || id == blank_ || id == pad_ || id == bos_ || id == eos_);
}

std::vector<int> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto id = find(t);
    if (!id || *id == blank_) {
      if (unk_ < 0) throw InvalidArgument("token '" + t + "' not in vocabulary and no <unk>");
      ids.push_back(unk_);
    } else {
      ids.push_back(*id);
    }
  }
  return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const int> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(token(id));
  return out;
}

std::string Vocabulary::decode_text(std::span<const int> ids) const {
  std::string out;
  for (int id : ids) {
    if (!out.empty()) out.push_back(' ');
    out += token(id);
  }
  return out;
}

void Vocabulary::save(const std::string& path) const { write_lines(path, tokens_); }

Vocabulary Vocabulary::load(const std::string& path) { return Vocabulary(read_lines(path)); }

Vocabulary build_vocab(std::span<const std::vector<std::string>> corpus,
                       std::span<const std::string> specials) {
  if (corpus.empty()) throw InvalidArgument("build_vocab: empty corpus");
  std::set<std::string> seen;
  for (const auto& s : specials) {
    if (!seen.insert(s).second) throw InvalidArgument("build_vocab: duplicate special '" + s + "'");
  }
  std::map<std::string, std::size_t> freq;
  for (const auto& sentence : corpus)
    for (const auto& tok : sentence)
      if (!seen.count(tok)) ++freq[tok];

  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> tokens(specials.begin(), specials.end());
  for (auto& [tok, count] : ranked) tokens.push_back(std::move(tok));
  return Vocabulary(std::move(tokens));
}

}  // namespace natkit
