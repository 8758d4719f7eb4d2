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
#include <vector>

#include "natkit/metrics.hpp"

namespace natkit::significance {

inline constexpr std::size_t kDefaultResamples = 1000;
inline constexpr double kAlpha = 0.05;

struct SystemRun {
  std::string id;
  std::vector<std::string> hypotheses;
};

struct BootstrapResult {
  double base_score = 0.0;
  double cand_score = 0.0;
  // Share of resamples where the observed winner fails to win, add-one
  // smoothed. 1 when the observed scores tie.
  double p = 1.0;
  std::size_t n_resamples = 0;
  bool significant() const { return p < kAlpha; }
};

BootstrapResult paired_bootstrap(metrics::Metric metric,
                                 std::span<const metrics::SentenceStats> base,
                                 std::span<const metrics::SentenceStats> cand,
                                 std::size_t n_resamples = kDefaultResamples,
                                 std::uint64_t seed = 1);

BootstrapResult paired_bootstrap(const SystemRun& base, const SystemRun& cand,
                                 std::span<const std::string> refs, metrics::Metric metric,
                                 std::size_t n_resamples = kDefaultResamples,
                                 std::uint64_t seed = 1);

// root: block root; child: compared to its block root; chain: compared to
// the row above it. Block roots after the first block of a category are
// compared to the category's first root.
enum class RowKind { root, child, chain };

struct TableRow {
  RowKind kind = RowKind::root;
  SystemRun system;
};

struct TableBlock {
  std::string name;
  std::vector<TableRow> rows;
};

struct TableCategory {
  std::string name;
  std::vector<TableBlock> blocks;
};

struct MarkedRow {
  std::string category;
  std::string block;
  std::string system;
  double value = 0.0;
  std::optional<std::string> base;
  std::optional<double> p;
  bool dagger = false;  // p >= 0.05
};

// Throws InvalidArgument for a block whose first row is not a root or a
// root that is not first in its block.
std::vector<MarkedRow> mark_table(std::span<const TableCategory> table,
                                  std::span<const std::string> refs, metrics::Metric metric,
                                  std::size_t n_resamples = kDefaultResamples,
                                  std::uint64_t seed = 1);

std::size_t comparison_count(std::span<const TableCategory> table);

// Columns: system, metric, value, base, p, dagger.
std::string to_tsv(std::span<const MarkedRow> rows, metrics::Metric metric);

// Text spec, one directive per line, '#' comments:
//   category NAME
//   block NAME
//   root|child|chain SYSTEM HYP_PATH
// Relative paths resolve against `base_dir`. Hypothesis files are read.
std::vector<TableCategory> load_table_spec(const std::string& path);
std::vector<TableCategory> parse_table_spec(const std::string& text, const std::string& base_dir);

}  // namespace natkit::significance
