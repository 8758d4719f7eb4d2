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
#include <cstdio>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "natkit/natkit.h"
#include "temp_dir.hpp"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  natkit_string_free(s);
  return out;
}

natkit_corpus* synth(std::size_t n, int modes, std::uint64_t seed) {
  natkit_synth_options o;
  natkit_synth_options_default(&o);
  o.n_pairs = n;
  o.modes = modes;
  o.seed = seed;
  natkit_corpus* c = nullptr;
  REQUIRE(natkit_corpus_synth(&o, &c) == NATKIT_OK);
  return c;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(natkit_version()) == "0.1.0");
  CHECK(std::string(natkit_status_name(NATKIT_ERR_IO)).size() > 0);
}

TEST_CASE("scoring through the C API") {
  const char* hyps[] = {"the cat sat on mat"};
  const char* refs[] = {"the cat sat on the mat"};
  natkit_metric m;
  REQUIRE(natkit_metric_parse("bleu", &m) == NATKIT_OK);
  natkit_report* r = nullptr;
  REQUIRE(natkit_score(m, hyps, refs, 1, &r) == NATKIT_OK);
  CHECK(natkit_report_value(r) == doctest::Approx(57.89300674674101));
  CHECK(natkit_report_recompute(r) == natkit_report_value(r));
  CHECK(natkit_report_sentences(r) == 1);
  CHECK(std::string(natkit_report_signature(r)) == natkit_metric_signature(m));
  char* text = nullptr;
  REQUIRE(natkit_report_text(r, &text) == NATKIT_OK);
  CHECK(take(text).rfind("BLEU = 57.89 (nrefs:1 | case:mixed", 0) == 0);
  const natkit_report* arr[] = {r};
  char* json = nullptr;
  REQUIRE(natkit_reports_json(arr, 1, &json) == NATKIT_OK);
  CHECK(nlohmann::json::parse(take(json))[0]["metric"] == "BLEU");
  natkit_report_free(r);

  CHECK(natkit_metric_parse("meteor", &m) == NATKIT_ERR_INVALID_ARGUMENT);
  CHECK(std::string(natkit_last_error()).find("meteor") != std::string::npos);
  const char* empty_ref[] = {""};
  REQUIRE(natkit_metric_parse("ter", &m) == NATKIT_OK);
  CHECK(natkit_score(m, hyps, empty_ref, 1, &r) == NATKIT_ERR_INVALID_ARGUMENT);
  CHECK(natkit_score(m, nullptr, refs, 1, &r) == NATKIT_ERR_INVALID_ARGUMENT);
}

TEST_CASE("edit distance and buckets") {
  CHECK(natkit_levenshtein_chars("kitten", "sitting") == 3);
  CHECK(natkit_levenshtein_tokens("a b c", "a c") == 1);
  const char* hyps[] = {"a b", "c d e"};
  const char* refs[] = {"a b", "c d f"};
  natkit_buckets* b = nullptr;
  REQUIRE(natkit_bucketed_bleu(hyps, refs, 2, nullptr, 0, &b) == NATKIT_OK);
  CHECK(natkit_buckets_count(b) == 6);
  double lo, hi, bleu;
  std::size_t n;
  int has;
  REQUIRE(natkit_buckets_get(b, 0, &lo, &hi, &n, &bleu, &has) == NATKIT_OK);
  CHECK(n == 2);
  CHECK(has == 1);
  REQUIRE(natkit_buckets_get(b, 5, &lo, &hi, &n, &bleu, &has) == NATKIT_OK);
  CHECK(std::isinf(hi));
  CHECK(has == 0);
  CHECK(natkit_buckets_get(b, 6, &lo, &hi, &n, &bleu, &has) == NATKIT_ERR_INVALID_ARGUMENT);
  natkit_buckets_free(b);
}

TEST_CASE("bootstrap through the C API") {
  const char* refs[] = {"a b c d", "e f g h", "i j k l"};
  const char* same[] = {"a b c x", "e f g h", "i j x l"};
  natkit_bootstrap_result r;
  REQUIRE(natkit_paired_bootstrap(NATKIT_METRIC_BLEU, same, same, refs, 3, 1000, 1, &r) == NATKIT_OK);
  CHECK(r.p == 1.0);
  CHECK(r.significant == 0);
}

TEST_CASE("corpus, model, train, decode, save, load") {
  natkit::testing::TempDir dir("capi");
  natkit_corpus* c = synth(120, 1, 5);
  CHECK(natkit_corpus_size(c) == 120);
  CHECK(natkit_corpus_line(c, NATKIT_SOURCE, 0) != nullptr);
  CHECK(natkit_corpus_line(c, NATKIT_TARGET, 120) == nullptr);
  natkit_corpus *train = nullptr, *held = nullptr;
  REQUIRE(natkit_corpus_split(c, 20, &train, &held) == NATKIT_OK);
  CHECK(natkit_corpus_size(held) == 20);

  natkit_model_config mc;
  natkit_model_config_default(&mc);
  mc.d_model = 16;
  natkit_model* m = nullptr;
  REQUIRE(natkit_model_create(train, &mc, 1, &m) == NATKIT_OK);
  CHECK(natkit_model_parameter_count(m) > 0);
  natkit_train_config tc;
  natkit_train_config_default(&tc);
  tc.max_steps = 30;
  int calls = 0;
  REQUIRE(natkit_model_train(m, train, &tc,
                             [](const natkit_step_record* rec, void* user) {
                               ++*static_cast<int*>(user);
                               CHECK(std::isfinite(rec->loss));
                             },
                             &calls) == NATKIT_OK);
  CHECK(calls == 30);

  char* hyp = nullptr;
  std::size_t passes = 0;
  REQUIRE(natkit_model_decode(m, natkit_corpus_line(held, NATKIT_SOURCE, 0), &hyp, &passes) == NATKIT_OK);
  const std::string first = take(hyp);
  CHECK(passes == 1);

  const std::string path = dir.file("m.ckpt");
  REQUIRE(natkit_model_save(m, path.c_str()) == NATKIT_OK);
  natkit_model* back = nullptr;
  REQUIRE(natkit_model_load(path.c_str(), &back) == NATKIT_OK);
  REQUIRE(natkit_model_decode(back, natkit_corpus_line(held, NATKIT_SOURCE, 0), &hyp, nullptr) == NATKIT_OK);
  CHECK(take(hyp) == first);
  natkit_model_config got;
  REQUIRE(natkit_model_get_config(back, &got) == NATKIT_OK);
  CHECK(got.d_model == 16);

  natkit_eval_result ev;
  REQUIRE(natkit_model_evaluate(back, held, &ev) == NATKIT_OK);
  CHECK(ev.exact_match >= 0.0);
  double loss = 0;
  REQUIRE(natkit_model_validation_loss(back, held, &loss) == NATKIT_OK);
  CHECK(std::isfinite(loss));

  const natkit_model* both[] = {m, back};
  natkit_model* avg = nullptr;
  REQUIRE(natkit_model_average(both, 2, &avg) == NATKIT_OK);
  REQUIRE(natkit_model_decode(avg, natkit_corpus_line(held, NATKIT_SOURCE, 0), &hyp, nullptr) == NATKIT_OK);
  CHECK(take(hyp) == first);

  const char* labels[] = {"a", "b"};
  char* tsv = nullptr;
  REQUIRE(natkit_bench_decode(both, labels, 2, held, 1, 0, &tsv) == NATKIT_OK);
  CHECK(take(tsv).rfind("label\tmean_ms\tstd_ms\truns\tspeedup_vs_base\na\t", 0) == 0);

  CHECK(natkit_model_load(dir.file("missing").c_str(), &back) == NATKIT_ERR_IO);
  mc.dropout = 0.9;
  natkit_model* bad = nullptr;
  CHECK(natkit_model_create(train, &mc, 1, &bad) == NATKIT_ERR_INVALID_ARGUMENT);
  CHECK(bad == nullptr);

  tc.lr = 1e300;
  tc.warmup = 1;
  tc.max_steps = 3;
  CHECK(natkit_model_train(m, train, &tc, nullptr, nullptr) == NATKIT_ERR_DIVERGED);

  natkit_model_free(avg);
  natkit_model_free(back);
  natkit_model_free(m);
  natkit_corpus_free(held);
  natkit_corpus_free(train);
  natkit_corpus_free(c);
  natkit_model_free(nullptr);
  natkit_corpus_free(nullptr);
}

TEST_CASE("corpus files through the C API") {
  natkit::testing::TempDir dir("capi_files");
  natkit_corpus* c = synth(10, 2, 3);
  const auto src = dir.file("c.src"), tgt = dir.file("c.tgt"), voc = dir.file("c.vocab");
  REQUIRE(natkit_corpus_save(c, src.c_str(), tgt.c_str()) == NATKIT_OK);
  REQUIRE(natkit_corpus_save_vocab(c, voc.c_str()) == NATKIT_OK);
  natkit_corpus* back = nullptr;
  REQUIRE(natkit_corpus_load(src.c_str(), tgt.c_str(), voc.c_str(), &back) == NATKIT_OK);
  for (std::size_t i = 0; i < 10; ++i)
    CHECK(std::string(natkit_corpus_line(back, NATKIT_TARGET, i)) == natkit_corpus_line(c, NATKIT_TARGET, i));
  CHECK(natkit_corpus_load(dir.file("nope").c_str(), tgt.c_str(), nullptr, &back) == NATKIT_ERR_IO);
  natkit_corpus_free(back);
  natkit_corpus_free(c);
}
