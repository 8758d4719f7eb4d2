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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "natkit/corpus.hpp"
#include "natkit/error.hpp"
#include "natkit/rng.hpp"
#include "natkit/significance.hpp"

namespace natkit::significance {

BootstrapResult paired_bootstrap(metrics::Metric metric,
                                 std::span<const metrics::SentenceStats> base,
                                 std::span<const metrics::SentenceStats> cand,
                                 std::size_t n_resamples, std::uint64_t seed) {
  if (base.size() != cand.size()) {
    throw InvalidArgument("paired bootstrap: corpus sizes differ (" + std::to_string(base.size()) +
                          " vs " + std::to_string(cand.size()) + ")");
  }
  if (base.empty()) throw InvalidArgument("paired bootstrap: empty corpus");
  if (n_resamples < 100) throw InvalidArgument("paired bootstrap: need at least 100 resamples");

  BootstrapResult r;
  r.n_resamples = n_resamples;
  r.base_score = metrics::score_from_stats(metric, base);
  r.cand_score = metrics::score_from_stats(metric, cand);
  if (r.base_score == r.cand_score) return r;

  const bool higher = metrics::higher_is_better(metric);
  const bool cand_wins = higher ? r.cand_score > r.base_score : r.cand_score < r.base_score;
  const auto n = static_cast<std::int64_t>(base.size());
  std::vector<std::size_t> idx(base.size());
  std::size_t losses = 0;
  for (std::size_t k = 0; k < n_resamples; ++k) {
    Rng rng(Rng::mix(seed, k));
    for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
    const double b = metrics::score_from_stats(metric, base, idx);
    const double c = metrics::score_from_stats(metric, cand, idx);
    const double win = cand_wins ? c : b;
    const double lose = cand_wins ? b : c;
    const bool wins = higher ? win > lose : win < lose;
    if (!wins) ++losses;
  }
  r.p = static_cast<double>(losses + 1) / static_cast<double>(n_resamples + 1);
  return r;
}

BootstrapResult paired_bootstrap(const SystemRun& base, const SystemRun& cand,
                                 std::span<const std::string> refs, metrics::Metric metric,
                                 std::size_t n_resamples, std::uint64_t seed) {
  if (base.hypotheses.size() != refs.size() || cand.hypotheses.size() != refs.size())
    throw InvalidArgument("paired bootstrap: hypothesis and reference counts differ");
  const auto b = metrics::score(metric, base.hypotheses, refs);
  const auto c = metrics::score(metric, cand.hypotheses, refs);
  return paired_bootstrap(metric, b.sentence_stats, c.sentence_stats, n_resamples, seed);
}

namespace {

void check_structure(std::span<const TableCategory> table) {
  for (const auto& cat : table) {
    if (cat.blocks.empty()) throw InvalidArgument("category '" + cat.name + "' has no blocks");
    for (const auto& block : cat.blocks) {
      if (block.rows.empty() || block.rows.front().kind != RowKind::root)
        throw InvalidArgument("block '" + block.name + "' has no root row");
      for (std::size_t i = 1; i < block.rows.size(); ++i)
        if (block.rows[i].kind == RowKind::root)
          throw InvalidArgument("block '" + block.name + "' has more than one root row");
    }
  }
}

}  // namespace

std::size_t comparison_count(std::span<const TableCategory> table) {
  check_structure(table);
  std::size_t rows = 0;
  for (const auto& cat : table)
    for (const auto& block : cat.blocks) rows += block.rows.size();
  return rows - table.size();
}

std::vector<MarkedRow> mark_table(std::span<const TableCategory> table, std::span<const std::string> refs,
                                  metrics::Metric metric, std::size_t n_resamples, std::uint64_t seed) {
  check_structure(table);
  std::vector<MarkedRow> out;
  for (const auto& cat : table) {
    std::vector<std::vector<metrics::ScoreReport>> reports;
    for (const auto& block : cat.blocks) {
      auto& rep = reports.emplace_back();
      for (const auto& row : block.rows) {
        if (row.system.hypotheses.size() != refs.size()) {
          throw InvalidArgument("system '" + row.system.id + "' has " +
                                std::to_string(row.system.hypotheses.size()) + " lines, references have " +
                                std::to_string(refs.size()));
        }
        rep.push_back(metrics::score(metric, row.system.hypotheses, refs));
      }
    }
    for (std::size_t b = 0; b < cat.blocks.size(); ++b) {
      const auto& block = cat.blocks[b];
      for (std::size_t i = 0; i < block.rows.size(); ++i) {
        MarkedRow m;
        m.category = cat.name;
        m.block = block.name;
        m.system = block.rows[i].system.id;
        m.value = reports[b][i].value;
        const metrics::ScoreReport* base = nullptr;
        if (i == 0) {
          if (b > 0) {
            base = &reports[0][0];
            m.base = cat.blocks[0].rows[0].system.id;
          }
        } else if (block.rows[i].kind == RowKind::child) {
          base = &reports[b][0];
          m.base = block.rows[0].system.id;
        } else {
          base = &reports[b][i - 1];
          m.base = block.rows[i - 1].system.id;
        }
        if (base) {
          const auto r = paired_bootstrap(metric, base->sentence_stats, reports[b][i].sentence_stats,
                                          n_resamples, seed);
          m.p = r.p;
          m.dagger = !r.significant();
        }
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

std::string to_tsv(std::span<const MarkedRow> rows, metrics::Metric metric) {
  std::ostringstream out;
  out << "system\tmetric\tvalue\tbase\tp\tdagger\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.2f", r.value);
    out << r.system << '\t' << metrics::to_string(metric) << '\t' << buf << '\t' << r.base.value_or("-") << '\t';
    if (r.p) {
      std::snprintf(buf, sizeof buf, "%.4f", *r.p);
      out << buf;
    } else {
      out << '-';
    }
    out << '\t' << (r.dagger ? "\xE2\x80\xA1" : "") << '\n';
  }
  return out.str();
}

std::vector<TableCategory> parse_table_spec(const std::string& text, const std::string& base_dir) {
  std::vector<TableCategory> table;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw FormatError("table spec line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto words = split_whitespace(line);
    if (words.empty()) continue;
    const auto& kw = words[0];
    if (kw == "category") {
      if (words.size() != 2) fail("expected 'category NAME'");
      table.push_back({words[1], {}});
    } else if (kw == "block") {
      if (words.size() != 2) fail("expected 'block NAME'");
      if (table.empty()) fail("block outside a category");
      table.back().blocks.push_back({words[1], {}});
    } else if (kw == "root" || kw == "child" || kw == "chain") {
      if (words.size() != 3) fail("expected '" + kw + " SYSTEM PATH'");
      if (table.empty() || table.back().blocks.empty()) fail("row outside a block");
      auto& rows = table.back().blocks.back().rows;
      const RowKind kind = kw == "root" ? RowKind::root : kw == "child" ? RowKind::child : RowKind::chain;
      if (rows.empty() && kind != RowKind::root) fail("block must start with a root row");
      if (!rows.empty() && kind == RowKind::root) fail("only the first row of a block can be a root");
      std::filesystem::path p(words[2]);
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      rows.push_back({kind, {words[1], read_lines(p.string())}});
    } else {
      fail("unknown directive '" + kw + "'");
    }
  }
  if (table.empty()) throw FormatError("table spec has no categories");
  for (const auto& cat : table) {
    if (cat.blocks.empty()) throw FormatError("category '" + cat.name + "' has no blocks");
    for (const auto& block : cat.blocks)
      if (block.rows.empty()) throw FormatError("block '" + block.name + "' has no root row");
  }
  return table;
}

std::vector<TableCategory> load_table_spec(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_table_spec(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace natkit::significance
