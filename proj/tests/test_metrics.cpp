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
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "natkit/corpus.hpp"
#include "natkit/error.hpp"
#include "natkit/metrics.hpp"
#include "natkit/rng.hpp"

using namespace natkit;
using namespace natkit::metrics;

namespace {

using Lines = std::vector<std::string>;

// Frozen from tests/oracles/metrics_oracle.py (sacreBLEU 2.0.0, TER with
// case_sensitive=True).
struct Frozen {
  const char* name;
  Lines hyps, refs;
  double bleu, chrfpp, ter;
};

const std::vector<Frozen>& frozen_cases() {
  static const std::vector<Frozen> cases{
      {"cat", {"the cat sat on mat"}, {"the cat sat on the mat"}, 57.89300674674101, 68.78770784041562,
       16.666666666666664},
      {"chars", {"abcd"}, {"abce"}, 0.0, 38.33333333333332, 100.0},
      {"shift", {"b a c d"}, {"a b c d"}, 37.99178428257963, 44.44444444444444, 25.0},
      {"mixed",
       {"Hello, world! This is a test.", "The quick brown fox jumps over the lazy dog", "naïve café résumé",
        "a a a a", "", "It's 3.5% of $100 -- right?"},
       {"Hello world, this is the test.", "A quick brown fox jumped over a lazy dog.", "naive cafe résumé",
        "a b a b a", "nothing here", "It is 3.5 % of $ 100 - right ?"},
       21.900860315674255, 53.03658079417338, 65.71428571428571},
      {"short", {"x y", "z"}, {"x y z w v", "z z z"}, 0.0, 31.70731707317073, 62.5},
  };
  return cases;
}

Lines read_fixture(const std::string& name) { return read_lines(std::string(NATKIT_TEST_DATA) + "/" + name); }

}  // namespace

TEST_CASE("frozen oracle values") {
  for (const auto& c : frozen_cases()) {
    CAPTURE(c.name);
    CHECK(bleu(c.hyps, c.refs).value == doctest::Approx(c.bleu).epsilon(1e-12));
    CHECK(chrfpp(c.hyps, c.refs).value == doctest::Approx(c.chrfpp).epsilon(1e-12));
    CHECK(ter(c.hyps, c.refs).value == doctest::Approx(c.ter).epsilon(1e-12));
  }
}

TEST_CASE("random fixture matches the oracle") {
  const auto hyps = read_fixture("random.hyp");
  const auto refs = read_fixture("random.ref");
  REQUIRE(hyps.size() == 200);
  CHECK(bleu(hyps, refs).value == doctest::Approx(70.59979249162727).epsilon(1e-12));
  CHECK(chrfpp(hyps, refs).value == doctest::Approx(80.85758125339218).epsilon(1e-12));
  CHECK(ter(hyps, refs).value == doctest::Approx(16.666666666666664).epsilon(1e-12));
}

TEST_CASE("hand-counted BLEU") {
  // c=5, r=6; precisions 5/5, 3/4, 2/3, 1/2; BP = exp(1 - 6/5).
  const double expected = 100.0 * std::exp(1.0 - 6.0 / 5.0) *
                          std::exp((std::log(1.0) + std::log(0.75) + std::log(2.0 / 3.0) + std::log(0.5)) / 4.0);
  CHECK(bleu(Lines{"the cat sat on mat"}, Lines{"the cat sat on the mat"}).value ==
        doctest::Approx(expected).epsilon(1e-12));
  const auto s = bleu_stats("the cat sat on mat", "the cat sat on the mat");
  CHECK(s == SentenceStats{5, 6, 5, 3, 2, 1, 5, 4, 3, 2});
}

TEST_CASE("BLEU smoothing keeps lower-order credit") {
  // No 4-gram match but unigrams to trigrams match.
  const double v = bleu(Lines{"a b c x d"}, Lines{"a b c y d"}).value;
  CHECK(v > 0.0);
  CHECK(std::isfinite(v));
}

TEST_CASE("hand-counted chrF++") {
  // Char orders 1..4 over abcd/abce: matches 3/4, 2/3, 1/2, 0/1; orders 5-6
  // have no n-grams. Word unigrams 0/1, bigrams none. Effective order 5.
  const double p = (0.75 + 2.0 / 3.0 + 0.5 + 0.0 + 0.0) / 5.0;
  const double f = p == 0 ? 0 : 5.0 * p * p / (4.0 * p + p);
  CHECK(chrfpp(Lines{"abcd"}, Lines{"abce"}).value == doctest::Approx(100.0 * f).epsilon(1e-12));
  CHECK(chrfpp(Lines{"abc"}, Lines{"xyz"}).value == 0.0);
}

TEST_CASE("TER cases") {
  CHECK(ter(Lines{"b a c d"}, Lines{"a b c d"}).value == doctest::Approx(25.0));
  CHECK(ter(Lines{"a b x d e"}, Lines{"a b c d e"}).value == doctest::Approx(20.0));
  CHECK(ter(Lines{"a"}, Lines{"a b c d"}).value == doctest::Approx(75.0));
  CHECK(ter(Lines{"a b c d e f"}, Lines{"a b"}).value == doctest::Approx(200.0));
  CHECK_THROWS_AS(ter(Lines{"a"}, Lines{""}), InvalidArgument);
}

TEST_CASE("TER agrees with a brute-force shift search on tiny cases") {
  // One shift is optimal whenever it turns the hypothesis into the reference.
  Rng rng(3);
  for (int n = 0; n < 200; ++n) {
    std::vector<std::string> ref;
    for (int k = 0; k < 6; ++k) ref.push_back(std::string(1, static_cast<char>('a' + k)));
    auto hyp = ref;
    const auto start = static_cast<std::size_t>(rng.uniform_int(0, 4));
    const auto len = static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(6 - start)));
    std::vector<std::string> block(hyp.begin() + static_cast<long>(start), hyp.begin() + static_cast<long>(start + len));
    hyp.erase(hyp.begin() + static_cast<long>(start), hyp.begin() + static_cast<long>(start + len));
    const auto at = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(hyp.size())));
    hyp.insert(hyp.begin() + static_cast<long>(at), block.begin(), block.end());
    const auto edits = ter_edits(hyp, ref);
    CHECK(edits == (hyp == ref ? 0u : 1u));
  }
}

TEST_CASE("identities on identical corpora") {
  const Lines x{"one two three", "Hello , world !", "ünïcode ok"};
  CHECK(bleu(x, x).value == doctest::Approx(100.0));
  CHECK(chrfpp(x, x).value == doctest::Approx(100.0));
  CHECK(ter(x, x).value == 0.0);
}

TEST_CASE("bounds and permutation invariance") {
  const auto hyps = read_fixture("random.hyp");
  const auto refs = read_fixture("random.ref");
  std::vector<std::size_t> order(hyps.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(8);
  for (std::size_t i = order.size() - 1; i > 0; --i)
    std::swap(order[i], order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
  Lines h2, r2;
  for (auto i : order) h2.push_back(hyps[i]), r2.push_back(refs[i]);
  for (auto m : {Metric::bleu, Metric::chrfpp, Metric::ter}) {
    const auto a = score(m, hyps, refs);
    const auto b = score(m, h2, r2);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
    CHECK(score_from_stats(m, a.sentence_stats) == a.value);
    if (m != Metric::ter) {
      CHECK(a.value >= 0.0);
      CHECK(a.value <= 100.0);
    }
  }
}

TEST_CASE("corpus errors") {
  CHECK_THROWS_AS(bleu(Lines{}, Lines{}), InvalidArgument);
  CHECK_THROWS_AS(chrfpp(Lines{"a"}, Lines{"a", "b"}), InvalidArgument);
  CHECK_THROWS_AS(parse_metric("meteor"), InvalidArgument);
}

TEST_CASE("signatures") {
  CHECK(signature(Metric::bleu) == "nrefs:1 | case:mixed | eff:no | tok:13a | smooth:exp | version:natkit-0.1.0");
  CHECK(signature(Metric::chrfpp) ==
        "nrefs:1 | case:mixed | eff:yes | nc:6 | nw:2 | space:no | version:natkit-0.1.0");
  CHECK(signature(Metric::ter) ==
        "nrefs:1 | case:mixed | tok:tercom | norm:no | punct:yes | asian:no | version:natkit-0.1.0");
  const auto r = bleu(Lines{"the cat sat on mat"}, Lines{"the cat sat on the mat"});
  CHECK(r.signature == signature(Metric::bleu));
  CHECK(to_text(r) == "BLEU = 57.89 (" + signature(Metric::bleu) + ")");
}

TEST_CASE("json reports") {
  const std::vector<ScoreReport> reps{bleu(Lines{"a b"}, Lines{"a b"}), ter(Lines{"a b"}, Lines{"a c"})};
  const auto j = nlohmann::json::parse(to_json(reps));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 2);
  CHECK(j[0]["metric"] == "BLEU");
  CHECK(j[1]["value"].get<double>() == doctest::Approx(50.0));
  CHECK(j[1]["n_sentences"] == 1);
  CHECK(j[1]["signature"] == signature(Metric::ter));
}

TEST_CASE("levenshtein") {
  CHECK(levenshtein_chars("kitten", "sitting") == 3);
  CHECK(levenshtein_chars("abc", "") == 3);
  CHECK(levenshtein_chars("héllo", "hello") == 1);
  const std::vector<int> a{1, 2, 3};
  CHECK(levenshtein(a, a) == 0);
  Rng rng(12);
  auto rand_seq = [&] {
    std::vector<int> s(static_cast<std::size_t>(rng.uniform_int(0, 8)));
    for (auto& x : s) x = static_cast<int>(rng.uniform_int(0, 3));
    return s;
  };
  for (int n = 0; n < 300; ++n) {
    const auto x = rand_seq(), y = rand_seq(), z = rand_seq();
    CHECK(levenshtein(x, y) == levenshtein(y, x));
    CHECK(levenshtein(x, z) <= levenshtein(x, y) + levenshtein(y, z));
  }
}

TEST_CASE("bucketed BLEU") {
  const auto hyps = read_fixture("random.hyp");
  const auto refs = read_fixture("random.ref");
  const std::vector<double> all{0, std::numeric_limits<double>::infinity()};
  const auto one = bucketed_bleu(hyps, refs, all);
  REQUIRE(one.size() == 1);
  CHECK(*one[0].bleu == doctest::Approx(bleu(hyps, refs).value).epsilon(1e-12));

  const std::vector<double> two{0, 15, std::numeric_limits<double>::infinity()};
  const auto b = bucketed_bleu(hyps, refs, two);
  REQUIRE(b.size() == 2);
  CHECK(b[0].n + b[1].n == hyps.size());
  Lines h0, r0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    if (tokenize_13a(refs[i]).size() < 15) h0.push_back(hyps[i]), r0.push_back(refs[i]);
  }
  CHECK(*b[0].bleu == doctest::Approx(bleu(h0, r0).value).epsilon(1e-12));

  const auto d = bucketed_bleu(hyps, refs);
  CHECK(d.size() == 6);
  std::size_t total = 0;
  for (const auto& k : d) total += k.n;
  CHECK(total == hyps.size());
  CHECK(d.back().n == 0);
  CHECK_FALSE(d.back().bleu.has_value());
  CHECK_THROWS_AS(bucketed_bleu(hyps, refs, std::vector<double>{0, 10, 5}), InvalidArgument);
}
