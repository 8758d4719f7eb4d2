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

#include "natkit/natkit.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "natkit/bench.hpp"
#include "natkit/corpus.hpp"
#include "natkit/error.hpp"
#include "natkit/metrics.hpp"
#include "natkit/model.hpp"
#include "natkit/significance.hpp"
#include "natkit/version.hpp"

struct natkit_report {
  natkit::metrics::ScoreReport report;
  std::string name;
};

struct natkit_buckets {
  std::vector<natkit::metrics::Bucket> buckets;
};

struct natkit_table {
  std::vector<natkit::significance::TableCategory> table;
};

struct natkit_corpus {
  natkit::ParallelCorpus corpus;
  std::vector<std::string> source_lines;
  std::vector<std::string> target_lines;
};

struct natkit_model {
  natkit::model::Model model;
};

namespace {

thread_local std::string g_last_error;

template <class F>
natkit_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return NATKIT_OK;
  } catch (const natkit::InvalidArgument& e) {
    g_last_error = e.what();
    return NATKIT_ERR_INVALID_ARGUMENT;
  } catch (const natkit::InfeasibleTarget& e) {
    g_last_error = e.what();
    return NATKIT_ERR_INFEASIBLE;
  } catch (const natkit::TrainingDiverged& e) {
    g_last_error = e.what();
    return NATKIT_ERR_DIVERGED;
  } catch (const natkit::IoError& e) {
    g_last_error = e.what();
    return NATKIT_ERR_IO;
  } catch (const natkit::FormatError& e) {
    g_last_error = e.what();
    return NATKIT_ERR_FORMAT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NATKIT_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return NATKIT_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw natkit::InvalidArgument(what);
}

char* dup_string(const std::string& s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

std::vector<std::string> collect(const char* const* lines, size_t n, const char* what) {
  require(n == 0 || lines != nullptr, what);
  std::vector<std::string> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    require(lines[i] != nullptr, what);
    out.emplace_back(lines[i]);
  }
  return out;
}

natkit::metrics::Metric to_metric(natkit_metric m) {
  switch (m) {
    case NATKIT_METRIC_BLEU: return natkit::metrics::Metric::bleu;
    case NATKIT_METRIC_CHRFPP: return natkit::metrics::Metric::chrfpp;
    case NATKIT_METRIC_TER: return natkit::metrics::Metric::ter;
  }
  throw natkit::InvalidArgument("unknown metric");
}

natkit_corpus* wrap_corpus(natkit::ParallelCorpus c) {
  auto h = std::make_unique<natkit_corpus>();
  h->source_lines = c.source_lines();
  h->target_lines = c.target_lines();
  h->corpus = std::move(c);
  return h.release();
}

natkit::model::ModelConfig to_config(const natkit_model_config& c) {
  namespace m = natkit::model;
  m::ModelConfig out;
  out.d_model = c.d_model;
  out.enc_layers = c.enc_layers;
  out.dec_layers = c.dec_layers;
  out.activation = c.activation == NATKIT_GELU ? m::Activation::gelu : m::Activation::relu;
  out.init = c.init == NATKIT_INIT_SCALED_NORMAL ? m::Init::scaled_normal : m::Init::fan_in_uniform;
  out.dropout = c.dropout;
  require(c.dec_layers >= 1 && c.dec_layers <= 64, "dec_layers must be in [1, 64]");
  out.dec_self_attention.clear();
  bool all = true;
  std::vector<bool> flags;
  for (int l = 0; l < c.dec_layers; ++l) {
    const bool on = (c.dec_self_attention_mask >> l) & 1u;
    flags.push_back(on);
    all = all && on;
  }
  if (!all) out.dec_self_attention = flags;
  switch (c.decoder_input) {
    case NATKIT_INPUT_UNK: out.decoder_input = m::DecoderInput::unk; break;
    case NATKIT_INPUT_UNIFORM_COPY: out.decoder_input = m::DecoderInput::uniform_copy; break;
    case NATKIT_INPUT_SOFT_COPY: out.decoder_input = m::DecoderInput::soft_copy; break;
    default: throw natkit::InvalidArgument("unknown decoder input strategy");
  }
  switch (c.mode) {
    case NATKIT_MODE_CTC: out.mode = m::OutputMode::ctc; break;
    case NATKIT_MODE_LENGTH: out.mode = m::OutputMode::length; break;
    case NATKIT_MODE_AUTOREGRESSIVE: out.mode = m::OutputMode::autoregressive; break;
    default: throw natkit::InvalidArgument("unknown output mode");
  }
  out.upsample = c.upsample;
  out.length_bound = c.length_bound;
  out.length_offset = c.length_offset != 0;
  out.deep_supervision = c.deep_supervision != 0;
  out.max_positions = c.max_positions;
  return out;
}

natkit_model_config from_config(const natkit::model::ModelConfig& c) {
  namespace m = natkit::model;
  natkit_model_config out{};
  out.d_model = c.d_model;
  out.enc_layers = c.enc_layers;
  out.dec_layers = c.dec_layers;
  out.activation = c.activation == m::Activation::gelu ? NATKIT_GELU : NATKIT_RELU;
  out.init = c.init == m::Init::scaled_normal ? NATKIT_INIT_SCALED_NORMAL : NATKIT_INIT_FAN_IN_UNIFORM;
  out.dropout = c.dropout;
  out.dec_self_attention_mask = 0;
  for (int l = 0; l < c.dec_layers; ++l)
    if (c.self_attention(l)) out.dec_self_attention_mask |= uint64_t{1} << l;
  out.decoder_input = c.decoder_input == m::DecoderInput::unk            ? NATKIT_INPUT_UNK
                      : c.decoder_input == m::DecoderInput::uniform_copy ? NATKIT_INPUT_UNIFORM_COPY
                                                                         : NATKIT_INPUT_SOFT_COPY;
  out.mode = c.mode == m::OutputMode::ctc      ? NATKIT_MODE_CTC
             : c.mode == m::OutputMode::length ? NATKIT_MODE_LENGTH
                                               : NATKIT_MODE_AUTOREGRESSIVE;
  out.upsample = c.upsample;
  out.length_bound = c.length_bound;
  out.length_offset = c.length_offset;
  out.deep_supervision = c.deep_supervision;
  out.max_positions = c.max_positions;
  return out;
}

natkit::model::TrainConfig to_train(const natkit_train_config& c) {
  natkit::model::TrainConfig t;
  t.lr = c.lr;
  t.warmup = c.warmup;
  t.beta1 = c.beta1;
  t.beta2 = c.beta2;
  t.adam_eps = c.adam_eps;
  t.max_steps = c.max_steps;
  t.batch_size = c.batch_size;
  t.glancing = c.glancing != 0;
  t.lambda_start = c.lambda_start;
  t.lambda_slope = c.lambda_slope;
  t.length_loss_weight = c.length_loss_weight;
  t.seed = c.seed;
  return t;
}

std::vector<int> encode_line(const natkit::model::Model& m, const char* line) {
  const auto tokens = natkit::tokenize_13a(line);
  return m.vocab.encode(tokens);
}

}  // namespace

extern "C" {

const char* natkit_version(void) { return NATKIT_VERSION_STRING; }

const char* natkit_last_error(void) { return g_last_error.c_str(); }

const char* natkit_status_name(natkit_status status) {
  switch (status) {
    case NATKIT_OK: return "ok";
    case NATKIT_ERR_INVALID_ARGUMENT: return "invalid argument";
    case NATKIT_ERR_INFEASIBLE: return "infeasible target";
    case NATKIT_ERR_DIVERGED: return "training diverged";
    case NATKIT_ERR_IO: return "i/o error";
    case NATKIT_ERR_FORMAT: return "format error";
    case NATKIT_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void natkit_string_free(char* s) { std::free(s); }

natkit_status natkit_metric_parse(const char* name, natkit_metric* out) {
  return guarded([&] {
    require(name && out, "natkit_metric_parse: null argument");
    switch (natkit::metrics::parse_metric(name)) {
      case natkit::metrics::Metric::bleu: *out = NATKIT_METRIC_BLEU; break;
      case natkit::metrics::Metric::chrfpp: *out = NATKIT_METRIC_CHRFPP; break;
      case natkit::metrics::Metric::ter: *out = NATKIT_METRIC_TER; break;
    }
  });
}

const char* natkit_metric_signature(natkit_metric metric) {
  static const std::string sigs[3] = {natkit::metrics::signature(natkit::metrics::Metric::bleu),
                                      natkit::metrics::signature(natkit::metrics::Metric::chrfpp),
                                      natkit::metrics::signature(natkit::metrics::Metric::ter)};
  if (metric < NATKIT_METRIC_BLEU || metric > NATKIT_METRIC_TER) return "";
  return sigs[metric].c_str();
}

natkit_status natkit_score(natkit_metric metric, const char* const* hyps, const char* const* refs, size_t n,
                           natkit_report** out) {
  return guarded([&] {
    require(out != nullptr, "natkit_score: null output");
    *out = nullptr;
    const auto h = collect(hyps, n, "natkit_score: null hypothesis");
    const auto r = collect(refs, n, "natkit_score: null reference");
    auto rep = std::make_unique<natkit_report>();
    rep->report = natkit::metrics::score(to_metric(metric), h, r);
    rep->name = natkit::metrics::display_name(rep->report.metric);
    *out = rep.release();
  });
}

double natkit_report_value(const natkit_report* report) { return report ? report->report.value : 0.0; }
const char* natkit_report_name(const natkit_report* report) { return report ? report->name.c_str() : ""; }
const char* natkit_report_signature(const natkit_report* report) {
  return report ? report->report.signature.c_str() : "";
}
size_t natkit_report_sentences(const natkit_report* report) { return report ? report->report.n_sentences : 0; }

double natkit_report_recompute(const natkit_report* report) {
  if (!report) return 0.0;
  return natkit::metrics::score_from_stats(report->report.metric, report->report.sentence_stats);
}

natkit_status natkit_report_text(const natkit_report* report, char** out) {
  return guarded([&] {
    require(report && out, "natkit_report_text: null argument");
    *out = dup_string(natkit::metrics::to_text(report->report));
  });
}

natkit_status natkit_reports_json(const natkit_report* const* reports, size_t n, char** out) {
  return guarded([&] {
    require(out != nullptr && (n == 0 || reports != nullptr), "natkit_reports_json: null argument");
    std::vector<natkit::metrics::ScoreReport> v;
    for (size_t i = 0; i < n; ++i) {
      require(reports[i] != nullptr, "natkit_reports_json: null report");
      v.push_back(reports[i]->report);
    }
    *out = dup_string(natkit::metrics::to_json(v));
  });
}

void natkit_report_free(natkit_report* report) { delete report; }

size_t natkit_levenshtein_tokens(const char* a, const char* b) {
  const auto ta = natkit::split_whitespace(a ? a : "");
  const auto tb = natkit::split_whitespace(b ? b : "");
  return natkit::metrics::levenshtein(std::span<const std::string>(ta), std::span<const std::string>(tb));
}

size_t natkit_levenshtein_chars(const char* a, const char* b) {
  return natkit::metrics::levenshtein_chars(a ? a : "", b ? b : "");
}

natkit_status natkit_bucketed_bleu(const char* const* hyps, const char* const* refs, size_t n, const double* edges,
                                   size_t n_edges, natkit_buckets** out) {
  return guarded([&] {
    require(out != nullptr, "natkit_bucketed_bleu: null output");
    *out = nullptr;
    const auto h = collect(hyps, n, "natkit_bucketed_bleu: null hypothesis");
    const auto r = collect(refs, n, "natkit_bucketed_bleu: null reference");
    auto b = std::make_unique<natkit_buckets>();
    if (edges) {
      b->buckets = natkit::metrics::bucketed_bleu(h, r, std::span<const double>(edges, n_edges));
    } else {
      b->buckets = natkit::metrics::bucketed_bleu(h, r);
    }
    *out = b.release();
  });
}

size_t natkit_buckets_count(const natkit_buckets* buckets) { return buckets ? buckets->buckets.size() : 0; }

natkit_status natkit_buckets_get(const natkit_buckets* buckets, size_t index, double* lo, double* hi, size_t* n,
                                 double* bleu, int* has_bleu) {
  return guarded([&] {
    require(buckets != nullptr && index < buckets->buckets.size(), "natkit_buckets_get: index out of range");
    const auto& b = buckets->buckets[index];
    if (lo) *lo = b.lo;
    if (hi) *hi = b.hi;
    if (n) *n = b.n;
    if (bleu) *bleu = b.bleu.value_or(0.0);
    if (has_bleu) *has_bleu = b.bleu.has_value() ? 1 : 0;
  });
}

void natkit_buckets_free(natkit_buckets* buckets) { delete buckets; }

natkit_status natkit_paired_bootstrap(natkit_metric metric, const char* const* base_hyps,
                                      const char* const* cand_hyps, const char* const* refs, size_t n,
                                      size_t n_resamples, uint64_t seed, natkit_bootstrap_result* out) {
  return guarded([&] {
    require(out != nullptr, "natkit_paired_bootstrap: null output");
    natkit::significance::SystemRun base{"base", collect(base_hyps, n, "null base hypothesis")};
    natkit::significance::SystemRun cand{"cand", collect(cand_hyps, n, "null candidate hypothesis")};
    const auto r = collect(refs, n, "null reference");
    const auto res = natkit::significance::paired_bootstrap(base, cand, r, to_metric(metric), n_resamples, seed);
    out->base_score = res.base_score;
    out->cand_score = res.cand_score;
    out->p = res.p;
    out->significant = res.significant() ? 1 : 0;
  });
}

natkit_status natkit_table_load(const char* spec_path, natkit_table** out) {
  return guarded([&] {
    require(spec_path && out, "natkit_table_load: null argument");
    *out = nullptr;
    auto t = std::make_unique<natkit_table>();
    t->table = natkit::significance::load_table_spec(spec_path);
    *out = t.release();
  });
}

size_t natkit_table_comparisons(const natkit_table* table) {
  return table ? natkit::significance::comparison_count(table->table) : 0;
}

natkit_status natkit_table_mark(const natkit_table* table, natkit_metric metric, const char* const* refs, size_t n,
                                size_t n_resamples, uint64_t seed, char** tsv) {
  return guarded([&] {
    require(table && tsv, "natkit_table_mark: null argument");
    const auto r = collect(refs, n, "natkit_table_mark: null reference");
    const auto m = to_metric(metric);
    const auto rows = natkit::significance::mark_table(table->table, r, m, n_resamples, seed);
    *tsv = dup_string(natkit::significance::to_tsv(rows, m));
  });
}

void natkit_table_free(natkit_table* table) { delete table; }

void natkit_synth_options_default(natkit_synth_options* options) {
  if (!options) return;
  const natkit::SynthOptions d;
  options->n_pairs = d.n_pairs;
  options->min_len = d.min_len;
  options->max_len = d.max_len;
  options->modes = d.modes;
  options->n_content = d.n_content;
  options->seed = d.seed;
}

natkit_status natkit_corpus_synth(const natkit_synth_options* options, natkit_corpus** out) {
  return guarded([&] {
    require(options && out, "natkit_corpus_synth: null argument");
    *out = nullptr;
    natkit::SynthOptions o;
    o.n_pairs = options->n_pairs;
    o.min_len = options->min_len;
    o.max_len = options->max_len;
    o.modes = options->modes;
    o.n_content = options->n_content;
    o.seed = options->seed;
    *out = wrap_corpus(natkit::synth_task(o));
  });
}

natkit_status natkit_corpus_load(const char* src_path, const char* tgt_path, const char* vocab_path,
                                 natkit_corpus** out) {
  return guarded([&] {
    require(src_path && tgt_path && out, "natkit_corpus_load: null argument");
    *out = nullptr;
    if (vocab_path) {
      const auto vocab = natkit::Vocabulary::load(vocab_path);
      *out = wrap_corpus(natkit::load_parallel(src_path, tgt_path, &vocab));
    } else {
      *out = wrap_corpus(natkit::load_parallel(src_path, tgt_path));
    }
  });
}

natkit_status natkit_corpus_save(const natkit_corpus* corpus, const char* src_path, const char* tgt_path) {
  return guarded([&] {
    require(corpus && src_path && tgt_path, "natkit_corpus_save: null argument");
    natkit::save_parallel(corpus->corpus, src_path, tgt_path);
  });
}

natkit_status natkit_corpus_save_vocab(const natkit_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus && path, "natkit_corpus_save_vocab: null argument");
    corpus->corpus.vocab.save(path);
  });
}

natkit_status natkit_corpus_split(const natkit_corpus* corpus, size_t n_heldout, natkit_corpus** train,
                                  natkit_corpus** heldout) {
  return guarded([&] {
    require(corpus && train && heldout, "natkit_corpus_split: null argument");
    *train = nullptr;
    *heldout = nullptr;
    auto [tr, ho] = natkit::split_heldout(corpus->corpus, n_heldout);
    std::unique_ptr<natkit_corpus> a(wrap_corpus(std::move(tr)));
    std::unique_ptr<natkit_corpus> b(wrap_corpus(std::move(ho)));
    *train = a.release();
    *heldout = b.release();
  });
}

size_t natkit_corpus_size(const natkit_corpus* corpus) { return corpus ? corpus->corpus.size() : 0; }

const char* natkit_corpus_line(const natkit_corpus* corpus, natkit_side side, size_t index) {
  if (!corpus) return nullptr;
  const auto& lines = side == NATKIT_SOURCE ? corpus->source_lines : corpus->target_lines;
  return index < lines.size() ? lines[index].c_str() : nullptr;
}

void natkit_corpus_free(natkit_corpus* corpus) { delete corpus; }

void natkit_model_config_default(natkit_model_config* config) {
  if (config) *config = from_config(natkit::model::ModelConfig{});
}

void natkit_train_config_default(natkit_train_config* config) {
  if (!config) return;
  const natkit::model::TrainConfig t;
  config->lr = t.lr;
  config->warmup = t.warmup;
  config->beta1 = t.beta1;
  config->beta2 = t.beta2;
  config->adam_eps = t.adam_eps;
  config->max_steps = t.max_steps;
  config->batch_size = t.batch_size;
  config->glancing = t.glancing ? 1 : 0;
  config->lambda_start = t.lambda_start;
  config->lambda_slope = t.lambda_slope;
  config->length_loss_weight = t.length_loss_weight;
  config->seed = t.seed;
}

natkit_status natkit_model_create(const natkit_corpus* corpus, const natkit_model_config* config, uint64_t seed,
                                  natkit_model** out) {
  return guarded([&] {
    require(corpus && config && out, "natkit_model_create: null argument");
    *out = nullptr;
    auto m = std::make_unique<natkit_model>();
    m->model = natkit::model::create_model(corpus->corpus.vocab, to_config(*config), seed);
    *out = m.release();
  });
}

natkit_status natkit_model_train(natkit_model* model, const natkit_corpus* corpus, const natkit_train_config* config,
                                 natkit_step_callback on_step, void* user) {
  return guarded([&] {
    require(model && corpus && config, "natkit_model_train: null argument");
    natkit::model::StepCallback cb;
    if (on_step) {
      cb = [&](const natkit::model::StepRecord& r) {
        const natkit_step_record rec{r.step, r.loss, r.token_loss, r.length_loss,
                                     r.lambda, r.lr, r.glanced, r.clamped};
        on_step(&rec, user);
      };
    }
    natkit::model::train(model->model, corpus->corpus, to_train(*config), cb);
  });
}

natkit_status natkit_model_decode(const natkit_model* model, const char* source, char** hypothesis,
                                  size_t* forward_passes) {
  return guarded([&] {
    require(model && source && hypothesis, "natkit_model_decode: null argument");
    *hypothesis = nullptr;
    natkit::model::ForwardCounter counter;
    const auto src = encode_line(model->model, source);
    const auto hyp = natkit::model::decode_any(model->model, src, &counter);
    *hypothesis = dup_string(model->model.vocab.decode_text(hyp));
    if (forward_passes) *forward_passes = counter.passes;
  });
}

natkit_status natkit_model_evaluate(const natkit_model* model, const natkit_corpus* corpus, natkit_eval_result* out) {
  return guarded([&] {
    require(model && corpus && out, "natkit_model_evaluate: null argument");
    const auto r = natkit::model::evaluate(model->model, corpus->corpus);
    out->exact_match = r.exact_match;
    out->repetition_rate = r.repetition_rate;
    out->mean_length = r.mean_length;
  });
}

natkit_status natkit_model_validation_loss(const natkit_model* model, const natkit_corpus* corpus, double* out) {
  return guarded([&] {
    require(model && corpus && out, "natkit_model_validation_loss: null argument");
    *out = natkit::model::validation_loss(model->model, corpus->corpus);
  });
}

natkit_status natkit_model_save(const natkit_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "natkit_model_save: null argument");
    natkit::model::save_model(model->model, path);
  });
}

natkit_status natkit_model_load(const char* path, natkit_model** out) {
  return guarded([&] {
    require(path && out, "natkit_model_load: null argument");
    *out = nullptr;
    auto m = std::make_unique<natkit_model>();
    m->model = natkit::model::load_model(path);
    *out = m.release();
  });
}

natkit_status natkit_model_average(const natkit_model* const* models, size_t n, natkit_model** out) {
  return guarded([&] {
    require(models && out && n > 0, "natkit_model_average: need at least one model");
    *out = nullptr;
    std::vector<natkit::model::ModelParams> params;
    for (size_t i = 0; i < n; ++i) {
      require(models[i] != nullptr, "natkit_model_average: null model");
      if (!(models[i]->model.vocab == models[0]->model.vocab))
        throw natkit::InvalidArgument("natkit_model_average: vocabularies differ");
      params.push_back(models[i]->model.params);
    }
    auto m = std::make_unique<natkit_model>();
    m->model.config = models[0]->model.config;
    m->model.vocab = models[0]->model.vocab;
    m->model.params = natkit::model::average_params(params);
    *out = m.release();
  });
}

natkit_status natkit_model_get_config(const natkit_model* model, natkit_model_config* out) {
  return guarded([&] {
    require(model && out, "natkit_model_get_config: null argument");
    *out = from_config(model->model.config);
  });
}

size_t natkit_model_parameter_count(const natkit_model* model) {
  return model ? model->model.params.parameter_count() : 0;
}

natkit_status natkit_model_vocab_save(const natkit_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "natkit_model_vocab_save: null argument");
    model->model.vocab.save(path);
  });
}

void natkit_model_free(natkit_model* model) { delete model; }

natkit_status natkit_bench_decode(const natkit_model* const* models, const char* const* labels, size_t n_models,
                                  const natkit_corpus* corpus, size_t runs, size_t warmup, char** tsv) {
  return guarded([&] {
    require(models && labels && corpus && tsv && n_models > 0, "natkit_bench_decode: null argument");
    std::vector<natkit::bench::LatencyStats> stats;
    for (size_t k = 0; k < n_models; ++k) {
      require(models[k] && labels[k], "natkit_bench_decode: null model or label");
      const auto& m = models[k]->model;
      std::vector<std::vector<int>> sources;
      for (const auto& line : corpus->source_lines) sources.push_back(encode_line(m, line.c_str()));
      stats.push_back(natkit::bench::time_decode(
          labels[k], sources.size(), [&](std::size_t i) { (void)natkit::model::decode_any(m, sources[i]); }, runs,
          warmup));
    }
    *tsv = dup_string(natkit::bench::to_tsv(stats));
  });
}

}  // extern "C"
