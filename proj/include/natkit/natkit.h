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

/* C interface to natkit. Every handle is opaque and owned by the caller;
 * release it with the matching *_free function. Functions returning
 * natkit_status leave a message for natkit_last_error() on failure. Strings
 * returned through char** are heap allocated; release with natkit_string_free. */
#ifndef NATKIT_NATKIT_H_
#define NATKIT_NATKIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(NATKIT_BUILDING)
#define NATKIT_API __declspec(dllexport)
#else
#define NATKIT_API __declspec(dllimport)
#endif
#else
#define NATKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum natkit_status {
  NATKIT_OK = 0,
  NATKIT_ERR_INVALID_ARGUMENT = 1,
  NATKIT_ERR_INFEASIBLE = 2,
  NATKIT_ERR_DIVERGED = 3,
  NATKIT_ERR_IO = 4,
  NATKIT_ERR_FORMAT = 5,
  NATKIT_ERR_INTERNAL = 6
} natkit_status;

NATKIT_API const char* natkit_version(void);
/* Message of the last failure on the calling thread, "" if none. */
NATKIT_API const char* natkit_last_error(void);
NATKIT_API const char* natkit_status_name(natkit_status status);
NATKIT_API void natkit_string_free(char* s);

/* ---- metrics ---- */

typedef enum natkit_metric {
  NATKIT_METRIC_BLEU = 0,
  NATKIT_METRIC_CHRFPP = 1,
  NATKIT_METRIC_TER = 2
} natkit_metric;

typedef struct natkit_report natkit_report;

NATKIT_API natkit_status natkit_metric_parse(const char* name, natkit_metric* out);
NATKIT_API const char* natkit_metric_signature(natkit_metric metric);

NATKIT_API natkit_status natkit_score(natkit_metric metric, const char* const* hyps,
                                      const char* const* refs, size_t n, natkit_report** out);
NATKIT_API double natkit_report_value(const natkit_report* report);
NATKIT_API const char* natkit_report_name(const natkit_report* report);
NATKIT_API const char* natkit_report_signature(const natkit_report* report);
NATKIT_API size_t natkit_report_sentences(const natkit_report* report);
/* Recomputes the corpus value from the stored sentence statistics. */
NATKIT_API double natkit_report_recompute(const natkit_report* report);
/* "BLEU = 57.89 (signature)" */
NATKIT_API natkit_status natkit_report_text(const natkit_report* report, char** out);
/* JSON array of {metric, value, signature, n_sentences}. */
NATKIT_API natkit_status natkit_reports_json(const natkit_report* const* reports, size_t n,
                                             char** out);
NATKIT_API void natkit_report_free(natkit_report* report);

/* Edit distance over whitespace-separated tokens. */
NATKIT_API size_t natkit_levenshtein_tokens(const char* a, const char* b);
/* Edit distance over Unicode code points. */
NATKIT_API size_t natkit_levenshtein_chars(const char* a, const char* b);

typedef struct natkit_buckets natkit_buckets;

/* Corpus BLEU per reference-length bucket [edges[k], edges[k+1]). Pass
 * edges = NULL for 0,10,20,30,40,50,inf. */
NATKIT_API natkit_status natkit_bucketed_bleu(const char* const* hyps, const char* const* refs,
                                              size_t n, const double* edges, size_t n_edges,
                                              natkit_buckets** out);
NATKIT_API size_t natkit_buckets_count(const natkit_buckets* buckets);
/* has_bleu is 0 for an empty bucket. */
NATKIT_API natkit_status natkit_buckets_get(const natkit_buckets* buckets, size_t index,
                                            double* lo, double* hi, size_t* n, double* bleu,
                                            int* has_bleu);
NATKIT_API void natkit_buckets_free(natkit_buckets* buckets);

/* ---- significance ---- */

typedef struct natkit_bootstrap_result {
  double base_score;
  double cand_score;
  double p;
  int significant;
} natkit_bootstrap_result;

NATKIT_API natkit_status natkit_paired_bootstrap(natkit_metric metric, const char* const* base_hyps,
                                                 const char* const* cand_hyps,
                                                 const char* const* refs, size_t n,
                                                 size_t n_resamples, uint64_t seed,
                                                 natkit_bootstrap_result* out);

typedef struct natkit_table natkit_table;

NATKIT_API natkit_status natkit_table_load(const char* spec_path, natkit_table** out);
NATKIT_API size_t natkit_table_comparisons(const natkit_table* table);
/* TSV: system, metric, value, base, p, dagger. */
NATKIT_API natkit_status natkit_table_mark(const natkit_table* table, natkit_metric metric,
                                           const char* const* refs, size_t n, size_t n_resamples,
                                           uint64_t seed, char** tsv);
NATKIT_API void natkit_table_free(natkit_table* table);

/* ---- corpora ---- */

typedef struct natkit_corpus natkit_corpus;

typedef struct natkit_synth_options {
  size_t n_pairs;
  int min_len;
  int max_len;
  int modes;
  int n_content;
  uint64_t seed;
} natkit_synth_options;

typedef enum natkit_side { NATKIT_SOURCE = 0, NATKIT_TARGET = 1 } natkit_side;

NATKIT_API void natkit_synth_options_default(natkit_synth_options* options);
NATKIT_API natkit_status natkit_corpus_synth(const natkit_synth_options* options,
                                             natkit_corpus** out);
/* vocab_path may be NULL to build a vocabulary from the files. */
NATKIT_API natkit_status natkit_corpus_load(const char* src_path, const char* tgt_path,
                                            const char* vocab_path, natkit_corpus** out);
NATKIT_API natkit_status natkit_corpus_save(const natkit_corpus* corpus, const char* src_path,
                                            const char* tgt_path);
NATKIT_API natkit_status natkit_corpus_save_vocab(const natkit_corpus* corpus, const char* path);
/* Last n_heldout pairs go to *heldout. */
NATKIT_API natkit_status natkit_corpus_split(const natkit_corpus* corpus, size_t n_heldout,
                                             natkit_corpus** train, natkit_corpus** heldout);
NATKIT_API size_t natkit_corpus_size(const natkit_corpus* corpus);
/* Borrowed pointer, valid until the corpus is freed. NULL if out of range. */
NATKIT_API const char* natkit_corpus_line(const natkit_corpus* corpus, natkit_side side,
                                          size_t index);
NATKIT_API void natkit_corpus_free(natkit_corpus* corpus);

/* ---- models ---- */

typedef enum natkit_activation { NATKIT_RELU = 0, NATKIT_GELU = 1 } natkit_activation;
typedef enum natkit_init { NATKIT_INIT_SCALED_NORMAL = 0, NATKIT_INIT_FAN_IN_UNIFORM = 1 } natkit_init;
typedef enum natkit_decoder_input {
  NATKIT_INPUT_UNK = 0,
  NATKIT_INPUT_UNIFORM_COPY = 1,
  NATKIT_INPUT_SOFT_COPY = 2
} natkit_decoder_input;
typedef enum natkit_output_mode {
  NATKIT_MODE_CTC = 0,
  NATKIT_MODE_LENGTH = 1,
  NATKIT_MODE_AUTOREGRESSIVE = 2
} natkit_output_mode;

typedef struct natkit_model_config {
  int d_model;
  int enc_layers;
  int dec_layers;
  natkit_activation activation;
  natkit_init init;
  double dropout;
  /* Bit l set: decoder layer l has self-attention. */
  uint64_t dec_self_attention_mask;
  natkit_decoder_input decoder_input;
  natkit_output_mode mode;
  int upsample;
  int length_bound;
  int length_offset;
  int deep_supervision;
  int max_positions;
} natkit_model_config;

typedef struct natkit_train_config {
  double lr;
  int warmup;
  double beta1;
  double beta2;
  double adam_eps;
  int64_t max_steps;
  int batch_size;
  int glancing;
  double lambda_start;
  double lambda_slope;
  double length_loss_weight;
  uint64_t seed;
} natkit_train_config;

typedef struct natkit_step_record {
  int64_t step;
  double loss;
  double token_loss;
  double length_loss;
  double lambda;
  double lr;
  size_t glanced;
  size_t clamped;
} natkit_step_record;

typedef void (*natkit_step_callback)(const natkit_step_record* record, void* user);

typedef struct natkit_eval_result {
  double exact_match;
  double repetition_rate;
  double mean_length;
} natkit_eval_result;

typedef struct natkit_model natkit_model;

NATKIT_API void natkit_model_config_default(natkit_model_config* config);
NATKIT_API void natkit_train_config_default(natkit_train_config* config);

/* The vocabulary is taken from `corpus`. */
NATKIT_API natkit_status natkit_model_create(const natkit_corpus* corpus,
                                             const natkit_model_config* config, uint64_t seed,
                                             natkit_model** out);
NATKIT_API natkit_status natkit_model_train(natkit_model* model, const natkit_corpus* corpus,
                                            const natkit_train_config* config,
                                            natkit_step_callback on_step, void* user);
/* Decodes one space-separated source line. forward_passes may be NULL. */
NATKIT_API natkit_status natkit_model_decode(const natkit_model* model, const char* source,
                                             char** hypothesis, size_t* forward_passes);
NATKIT_API natkit_status natkit_model_evaluate(const natkit_model* model,
                                               const natkit_corpus* corpus,
                                               natkit_eval_result* out);
NATKIT_API natkit_status natkit_model_validation_loss(const natkit_model* model,
                                                      const natkit_corpus* corpus, double* out);
NATKIT_API natkit_status natkit_model_save(const natkit_model* model, const char* path);
NATKIT_API natkit_status natkit_model_load(const char* path, natkit_model** out);
NATKIT_API natkit_status natkit_model_average(const natkit_model* const* models, size_t n,
                                              natkit_model** out);
NATKIT_API natkit_status natkit_model_get_config(const natkit_model* model,
                                                 natkit_model_config* out);
NATKIT_API size_t natkit_model_parameter_count(const natkit_model* model);
/* One token per line. */
NATKIT_API natkit_status natkit_model_vocab_save(const natkit_model* model, const char* path);
NATKIT_API void natkit_model_free(natkit_model* model);

/* ---- latency ---- */

/* Times batch-size-1 decoding of every source line of `corpus` with each
 * model. Writes a TSV (label, mean_ms, std_ms, runs, speedup_vs_base) with
 * the first model as base. */
NATKIT_API natkit_status natkit_bench_decode(const natkit_model* const* models,
                                             const char* const* labels, size_t n_models,
                                             const natkit_corpus* corpus, size_t runs,
                                             size_t warmup, char** tsv);

#ifdef __cplusplus
}
#endif

#endif /* NATKIT_NATKIT_H_ */
