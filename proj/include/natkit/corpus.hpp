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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace natkit {

inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kBlankToken = "<blank>";
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kBosToken = "<bos>";
inline constexpr std::string_view kEosToken = "<eos>";

// <unk>, <blank>, <pad>, <bos>, <eos> in that order.
std::vector<std::string> default_specials();

// Dense id <-> token mapping. Special tokens keep the lowest ids.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Throws InvalidArgument on duplicate tokens.
  explicit Vocabulary(std::vector<std::string> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const;
  std::optional<int> find(std::string_view token) const;
  bool contains(int id) const { return id >= 0 && id < size(); }

  // -1 when the vocabulary has no such special.
  int unk() const { return unk_; }
  int blank() const { return blank_; }
  int pad() const { return pad_; }
  int bos() const { return bos_; }
  int eos() const { return eos_; }
  bool is_special(int id) const;

  // Out-of-vocabulary tokens and the literal "<blank>" map to <unk>.
  std::vector<int> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const int> ids) const;
  // Space-joined surface string.
  std::string decode_text(std::span<const int> ids) const;

  const std::vector<std::string>& tokens() const { return tokens_; }

  // One token per line; line number is the id.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  int unk_ = -1, blank_ = -1, pad_ = -1, bos_ = -1, eos_ = -1;
};

enum class SeqRole { source, target, hypothesis };

struct TokenSeq {
  std::vector<int> ids;
  SeqRole role = SeqRole::target;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

struct SentencePair {
  TokenSeq source;
  TokenSeq target;
};

struct ParallelCorpus {
  Vocabulary vocab;
  std::vector<SentencePair> pairs;
  std::string name;
  std::uint64_t seed = 0;
  int modes = 0;

  std::size_t size() const { return pairs.size(); }
  // Source/target lines as surface strings.
  std::vector<std::string> source_lines() const;
  std::vector<std::string> target_lines() const;
  // Throws FormatError if any id is outside the vocabulary or a <blank>
  // appears in a source/target sequence.
  void validate() const;
};

// mteval-v13a tokenization as used by WMT BLEU scoring.
std::vector<std::string> tokenize_13a(std::string_view text);
// tokenize_13a joined by single spaces.
std::string tokenize_13a_line(std::string_view text);

// Whitespace split honoring the Unicode whitespace set of Python's
// str.split().
std::vector<std::string> split_whitespace(std::string_view text);

// Specials first in the given order, remaining tokens by (frequency desc,
// lexicographic). Throws InvalidArgument on duplicate specials or an empty
// corpus.
Vocabulary build_vocab(std::span<const std::vector<std::string>> corpus,
                       std::span<const std::string> specials);

// Vocabulary of the synthetic task: default specials then w0..w{n-1}.
Vocabulary synth_vocabulary(int n_content);

struct SynthOptions {
  std::size_t n_pairs = 1000;
  int min_len = 3;
  int max_len = 8;
  int modes = 1;
  std::uint64_t seed = 1;
  int n_content = 16;
};

// The two teacher mappings of the synthetic task. Inputs and outputs are
// ids of synth_vocabulary(n_content).
std::vector<int> synth_mapping_shift(std::span<const int> src, int n_content);
std::vector<int> synth_mapping_reverse(std::span<const int> src, int n_content);

// Synthetic translation task. modes=1 applies the shift mapping to every
// sentence; modes=2 picks one of the two mappings per sentence.
ParallelCorpus synth_task(const SynthOptions& options);

// Splits off the last `n_heldout` pairs.
std::pair<ParallelCorpus, ParallelCorpus> split_heldout(const ParallelCorpus& corpus,
                                                        std::size_t n_heldout);

// UTF-8 text files, one sentence per line, LF endings.
std::vector<std::string> read_lines(const std::string& path);
void write_lines(const std::string& path, std::span<const std::string> lines);

// Lines are 13a-tokenized. When `vocab` is empty a vocabulary is built from
// both sides with default specials.
ParallelCorpus load_parallel(const std::string& src_path, const std::string& tgt_path,
                             const Vocabulary* vocab = nullptr);
void save_parallel(const ParallelCorpus& corpus, const std::string& src_path,
                   const std::string& tgt_path);

}  // namespace natkit
