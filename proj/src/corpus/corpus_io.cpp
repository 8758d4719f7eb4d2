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

#include <fstream>
#include <sstream>

#include "natkit/corpus.hpp"
#include "natkit/error.hpp"

namespace natkit {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < data.size()) {
    std::size_t nl = data.find('\n', start);
    if (nl == std::string::npos) nl = data.size();
    lines.emplace_back(data, start, nl - start);
    start = nl + 1;
  }
  return lines;
}

void write_lines(const std::string& path, std::span<const std::string> lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<std::string> ParallelCorpus::source_lines() const {
  std::vector<std::string> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(vocab.decode_text(p.source.ids));
  return out;
}

std::vector<std::string> ParallelCorpus::target_lines() const {
  std::vector<std::string> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(vocab.decode_text(p.target.ids));
  return out;
}

void ParallelCorpus::validate() const {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (const auto* seq : {&pairs[i].source, &pairs[i].target}) {
      for (int id : seq->ids) {
        if (!vocab.contains(id))
          throw FormatError("pair " + std::to_string(i) + ": id " + std::to_string(id) + " outside vocabulary");
        if (id == vocab.blank())
          throw FormatError("pair " + std::to_string(i) + ": <blank> in a source/target sequence");
      }
    }
  }
}

ParallelCorpus load_parallel(const std::string& src_path, const std::string& tgt_path,
                             const Vocabulary* vocab) {
  const auto src_lines = read_lines(src_path);
  const auto tgt_lines = read_lines(tgt_path);
  if (src_lines.size() != tgt_lines.size()) {
    throw FormatError("parallel files differ in length: " + std::to_string(src_lines.size()) +
                      " vs " + std::to_string(tgt_lines.size()) + " lines");
  }
  std::vector<std::vector<std::string>> src_tok, tgt_tok;
  src_tok.reserve(src_lines.size());
  tgt_tok.reserve(tgt_lines.size());
  for (const auto& l : src_lines) src_tok.push_back(tokenize_13a(l));
  for (const auto& l : tgt_lines) tgt_tok.push_back(tokenize_13a(l));

  ParallelCorpus corpus;
  corpus.name = src_path;
  if (vocab && vocab->size() > 0) {
    corpus.vocab = *vocab;
  } else {
    std::vector<std::vector<std::string>> all = src_tok;
    all.insert(all.end(), tgt_tok.begin(), tgt_tok.end());
    const auto specials = default_specials();
    corpus.vocab = build_vocab(all, specials);
  }
  corpus.pairs.reserve(src_tok.size());
  for (std::size_t i = 0; i < src_tok.size(); ++i) {
    corpus.pairs.push_back({TokenSeq{corpus.vocab.encode(src_tok[i]), SeqRole::source},
                            TokenSeq{corpus.vocab.encode(tgt_tok[i]), SeqRole::target}});
  }
  return corpus;
}

void save_parallel(const ParallelCorpus& corpus, const std::string& src_path,
                   const std::string& tgt_path) {
  write_lines(src_path, corpus.source_lines());
  write_lines(tgt_path, corpus.target_lines());
}

}  // namespace natkit
