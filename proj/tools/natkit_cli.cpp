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
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_common.hpp"
#include "json.hpp"

using namespace natkit_cli;

namespace {

struct ModelOpts {
  int d_model = 32;
  int enc_layers = 2;
  int dec_layers = 2;
  std::string activation = "relu";
  std::string init = "fan_in_uniform";
  double dropout = 0.0;
  std::string self_attention;
  std::string decoder_input = "unk";
  std::string mode = "ctc";
  int upsample = 2;
  int length_bound = 32;
  bool length_offset = true;
  bool deep_supervision = false;
  int max_positions = 256;
};

struct TrainOpts {
  double lr = 5e-3;
  int warmup = 100;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double adam_eps = 1e-8;
  std::int64_t steps = 1000;
  int batch_size = 16;
  bool glancing = false;
  double lambda_start = 0.5;
  double lambda_slope = 0.2;
  double length_loss_weight = 0.1;
};

template <class E>
E pick(const std::map<std::string, E>& table, const std::string& value, const std::string& what) {
  auto it = table.find(value);
  if (it == table.end()) throw Failure(kExitInput, "unknown " + what + ": " + value);
  return it->second;
}

natkit_model_config to_config(const ModelOpts& o) {
  natkit_model_config c;
  natkit_model_config_default(&c);
  c.d_model = o.d_model;
  c.enc_layers = o.enc_layers;
  c.dec_layers = o.dec_layers;
  c.activation = pick<natkit_activation>({{"relu", NATKIT_RELU}, {"gelu", NATKIT_GELU}}, o.activation, "activation");
  c.init = pick<natkit_init>({{"scaled_normal", NATKIT_INIT_SCALED_NORMAL},
                              {"bert", NATKIT_INIT_SCALED_NORMAL},
                              {"fan_in_uniform", NATKIT_INIT_FAN_IN_UNIFORM}},
                             o.init, "init");
  c.dropout = o.dropout;
  if (o.dec_layers < 1 || o.dec_layers > 64) throw Failure(kExitInput, "dec-layers must be in [1, 64]");
  c.dec_self_attention_mask = o.dec_layers == 64 ? ~uint64_t{0} : (uint64_t{1} << o.dec_layers) - 1;
  if (!o.self_attention.empty()) {
    if (static_cast<int>(o.self_attention.size()) != o.dec_layers)
      throw Failure(kExitInput, "self-attention needs one 0/1 flag per decoder layer");
    c.dec_self_attention_mask = 0;
    for (int l = 0; l < o.dec_layers; ++l) {
      const char f = o.self_attention[static_cast<std::size_t>(l)];
      if (f != '0' && f != '1') throw Failure(kExitInput, "self-attention flags must be 0 or 1");
      if (f == '1') c.dec_self_attention_mask |= uint64_t{1} << l;
    }
  }
  c.decoder_input = pick<natkit_decoder_input>({{"unk", NATKIT_INPUT_UNK},
                                                {"uniform_copy", NATKIT_INPUT_UNIFORM_COPY},
                                                {"soft_copy", NATKIT_INPUT_SOFT_COPY}},
                                               o.decoder_input, "decoder input");
  c.mode = pick<natkit_output_mode>({{"ctc", NATKIT_MODE_CTC},
                                     {"length", NATKIT_MODE_LENGTH},
                                     {"autoregressive", NATKIT_MODE_AUTOREGRESSIVE},
                                     {"at", NATKIT_MODE_AUTOREGRESSIVE}},
                                    o.mode, "mode");
  c.upsample = o.upsample;
  c.length_bound = o.length_bound;
  c.length_offset = o.length_offset ? 1 : 0;
  c.deep_supervision = o.deep_supervision ? 1 : 0;
  c.max_positions = o.max_positions;
  return c;
}

natkit_train_config to_train(const TrainOpts& o, std::uint64_t seed) {
  natkit_train_config t;
  natkit_train_config_default(&t);
  t.lr = o.lr;
  t.warmup = o.warmup;
  t.beta1 = o.beta1;
  t.beta2 = o.beta2;
  t.adam_eps = o.adam_eps;
  t.max_steps = o.steps;
  t.batch_size = o.batch_size;
  t.glancing = o.glancing ? 1 : 0;
  t.lambda_start = o.lambda_start;
  t.lambda_slope = o.lambda_slope;
  t.length_loss_weight = o.length_loss_weight;
  t.seed = seed;
  return t;
}

void add_model_options(CLI::App* app, ModelOpts& o) {
  app->add_option("--d-model", o.d_model, "Embedding width")->capture_default_str();
  app->add_option("--enc-layers", o.enc_layers, "Encoder blocks")->capture_default_str();
  app->add_option("--dec-layers", o.dec_layers, "Decoder layers")->capture_default_str();
  app->add_option("--activation", o.activation, "relu | gelu")->capture_default_str();
  app->add_option("--init", o.init, "fan_in_uniform | scaled_normal")->capture_default_str();
  app->add_option("--dropout", o.dropout, "Dropout ratio in [0, 0.5]")->capture_default_str();
  app->add_option("--self-attention", o.self_attention, "Per-layer flags, e.g. 01 (default all on)");
  app->add_option("--decoder-input", o.decoder_input, "unk | uniform_copy | soft_copy")->capture_default_str();
  app->add_option("--mode", o.mode, "ctc | length | autoregressive")->capture_default_str();
  app->add_option("--upsample", o.upsample, "Decoder length factor in ctc mode")->capture_default_str();
  app->add_option("--length-bound", o.length_bound, "Length head offset bound K")->capture_default_str();
  app->add_option("--length-offset", o.length_offset, "Predict length offsets (else absolute)")->capture_default_str();
  app->add_option("--deep-supervision", o.deep_supervision, "Average losses over decoder layers")->capture_default_str();
  app->add_option("--max-positions", o.max_positions, "Positional table size")->capture_default_str();
}

void add_train_options(CLI::App* app, TrainOpts& o) {
  app->add_option("--lr", o.lr, "Peak learning rate")->capture_default_str();
  app->add_option("--warmup", o.warmup, "Warmup steps")->capture_default_str();
  app->add_option("--beta1", o.beta1)->capture_default_str();
  app->add_option("--beta2", o.beta2)->capture_default_str();
  app->add_option("--adam-eps", o.adam_eps)->capture_default_str();
  app->add_option("--steps", o.steps, "Update steps")->capture_default_str();
  app->add_option("--batch-size", o.batch_size)->capture_default_str();
  app->add_option("--glancing", o.glancing, "Glancing training")->capture_default_str();
  app->add_option("--lambda-start", o.lambda_start)->capture_default_str();
  app->add_option("--lambda-slope", o.lambda_slope)->capture_default_str();
  app->add_option("--length-loss-weight", o.length_loss_weight)->capture_default_str();
}

Corpus load_corpus(const std::string& src, const std::string& tgt, const std::string& vocab) {
  Corpus c;
  check(natkit_corpus_load(src.c_str(), tgt.c_str(), vocab.empty() ? nullptr : vocab.c_str(), c.out()),
        "loading corpus");
  return c;
}

// ---- score ----

struct ScoreArgs {
  std::string hyp, ref, out;
  std::vector<std::string> metrics{"bleu", "chrfpp", "ter"};
  bool json = false;
};

int run_score(const ScoreArgs& a) {
  const auto hyps = read_lines(a.hyp);
  const auto refs = read_lines(a.ref);
  check_aligned(hyps, refs, a.hyp, a.ref);
  const auto h = c_strs(hyps), r = c_strs(refs);
  std::vector<Report> reports;
  for (const auto& name : a.metrics) {
    natkit_metric m;
    check(natkit_metric_parse(name.c_str(), &m), "metric");
    Report rep;
    check(natkit_score(m, h.data(), r.data(), hyps.size(), rep.out()), name);
    reports.push_back(std::move(rep));
  }
  std::string text;
  if (a.json) {
    std::vector<const natkit_report*> ptrs;
    for (const auto& rep : reports) ptrs.push_back(rep.get());
    CString s;
    check(natkit_reports_json(ptrs.data(), ptrs.size(), s.out()), "json");
    text = s.str() + "\n";
  } else {
    for (const auto& rep : reports) {
      CString s;
      check(natkit_report_text(rep.get(), s.out()), "report");
      text += s.str() + "\n";
    }
  }
  write_text(a.out, text);
  return kExitOk;
}

// ---- signif ----

struct SignifArgs {
  std::string spec, ref, out, metric = "bleu";
  std::size_t resamples = 1000;
};

int run_signif(const SignifArgs& a, std::uint64_t seed) {
  const auto refs = read_lines(a.ref);
  natkit_metric m;
  check(natkit_metric_parse(a.metric.c_str(), &m), "metric");
  Table t;
  check(natkit_table_load(a.spec.c_str(), t.out()), "table spec");
  const auto r = c_strs(refs);
  CString tsv;
  check(natkit_table_mark(t.get(), m, r.data(), refs.size(), a.resamples, seed, tsv.out()), "marking table");
  write_text(a.out, tsv.str());
  return kExitOk;
}

// ---- synth ----

struct SynthArgs {
  std::size_t pairs = 1000;
  int min_len = 3, max_len = 8, modes = 1, n_content = 16;
  std::size_t heldout = 0;
  std::string out;
};

int run_synth(const SynthArgs& a, std::uint64_t seed) {
  natkit_synth_options o;
  natkit_synth_options_default(&o);
  o.n_pairs = a.pairs;
  o.min_len = a.min_len;
  o.max_len = a.max_len;
  o.modes = a.modes;
  o.n_content = a.n_content;
  o.seed = seed;
  Corpus c;
  check(natkit_corpus_synth(&o, c.out()), "synth");
  check(natkit_corpus_save(c.get(), (a.out + ".src").c_str(), (a.out + ".tgt").c_str()), "saving corpus");
  check(natkit_corpus_save_vocab(c.get(), (a.out + ".vocab").c_str()), "saving vocabulary");
  if (a.heldout > 0) {
    Corpus tr, ho;
    check(natkit_corpus_split(c.get(), a.heldout, tr.out(), ho.out()), "split");
    check(natkit_corpus_save(tr.get(), (a.out + ".train.src").c_str(), (a.out + ".train.tgt").c_str()), "saving");
    check(natkit_corpus_save(ho.get(), (a.out + ".test.src").c_str(), (a.out + ".test.tgt").c_str()), "saving");
  }
  return kExitOk;
}

// ---- train ----

struct TrainArgs {
  std::string src, tgt, vocab, out, log;
  ModelOpts model;
  TrainOpts train;
};

struct LogSink {
  std::ofstream* out = nullptr;
};

void log_step(const natkit_step_record* r, void* user) {
  auto* sink = static_cast<LogSink*>(user);
  if (!sink->out) return;
  nlohmann::ordered_json j;
  j["step"] = r->step;
  j["loss"] = r->loss;
  j["components"] = {{"token", r->token_loss}, {"length", r->length_loss}};
  j["lambda"] = r->lambda;
  j["lr"] = r->lr;
  j["glanced"] = r->glanced;
  j["clamped"] = r->clamped;
  *sink->out << j.dump() << '\n';
}

int run_train(const TrainArgs& a, std::uint64_t seed) {
  auto corpus = load_corpus(a.src, a.tgt, a.vocab);
  const auto mc = to_config(a.model);
  const auto tc = to_train(a.train, seed);
  Model m;
  check(natkit_model_create(corpus.get(), &mc, seed, m.out()), "creating model");
  std::ofstream log;
  LogSink sink;
  if (!a.log.empty()) {
    log.open(a.log, std::ios::binary);
    if (!log) throw Failure(kExitInput, "cannot open '" + a.log + "' for writing");
    sink.out = &log;
  }
  const auto st = natkit_model_train(m.get(), corpus.get(), &tc, log_step, &sink);
  if (st == NATKIT_ERR_DIVERGED) throw Failure(kExitInternal, std::string("diverges: ") + natkit_last_error());
  check(st, "training");
  check(natkit_model_save(m.get(), a.out.c_str()), "saving model");
  return kExitOk;
}

// ---- decode ----

struct DecodeArgs {
  std::string model, input, out;
};

int run_decode(const DecodeArgs& a) {
  Model m;
  check(natkit_model_load(a.model.c_str(), m.out()), "loading model");
  const auto lines = read_lines(a.input);
  std::string text;
  for (const auto& line : lines) {
    CString hyp;
    check(natkit_model_decode(m.get(), line.c_str(), hyp.out(), nullptr), "decoding");
    text += hyp.str() + "\n";
  }
  write_text(a.out, text);
  return kExitOk;
}

// ---- sweep ----

struct SweepArgs {
  std::string src, tgt, vocab, out, knob = "dropout";
  std::vector<double> values;
  std::size_t heldout = 200;
  ModelOpts model;
  TrainOpts train;
};

int run_sweep(SweepArgs a, std::uint64_t seed) {
  if (a.values.empty()) {
    if (a.knob == "dropout") {
      for (int k = 0; k <= 5; ++k) a.values.push_back(k / 10.0);
    } else if (a.knob == "adam_eps") {
      for (int e = -9; e <= -1; ++e) a.values.push_back(std::stod("1e" + std::to_string(e)));
    }
  }
  if (a.knob != "dropout" && a.knob != "adam_eps") throw Failure(kExitInput, "unknown knob: " + a.knob);
  auto full = load_corpus(a.src, a.tgt, a.vocab);
  Corpus train, heldout;
  check(natkit_corpus_split(full.get(), a.heldout, train.out(), heldout.out()), "held-out split");

  std::string tsv = "knob\tvalue\tstatus\tvalidation_loss\texact_match\n";
  std::vector<std::string> diverged;
  for (double v : a.values) {
    auto mo = a.model;
    auto to = a.train;
    if (a.knob == "dropout") mo.dropout = v; else to.adam_eps = v;
    const auto mc = to_config(mo);
    const auto tc = to_train(to, seed);
    const std::string value = fmt("%g", v);
    Model m;
    check(natkit_model_create(train.get(), &mc, seed, m.out()), "creating model");
    const auto st = natkit_model_train(m.get(), train.get(), &tc, nullptr, nullptr);
    if (st == NATKIT_ERR_DIVERGED) {
      tsv += a.knob + "\t" + value + "\tdiverges\t-\t-\n";
      diverged.push_back(value);
      continue;
    }
    check(st, "training with " + a.knob + "=" + value);
    double loss = 0.0;
    check(natkit_model_validation_loss(m.get(), heldout.get(), &loss), "validation loss");
    natkit_eval_result ev;
    check(natkit_model_evaluate(m.get(), heldout.get(), &ev), "evaluation");
    tsv += a.knob + "\t" + value + "\tok\t" + fmt("%.6f", loss) + "\t" + fmt("%.4f", ev.exact_match) + "\n";
  }
  write_text(a.out, tsv);
  if (!diverged.empty()) {
    std::string msg = "training diverges for " + a.knob + " =";
    for (const auto& v : diverged) msg += " " + v;
    throw Failure(kExitInternal, msg);
  }
  return kExitOk;
}

// ---- bench ----

struct BenchArgs {
  std::vector<std::string> models, labels;
  std::string src, out;
  std::size_t runs = 3, warmup = 3;
};

int run_bench(BenchArgs a) {
  if (a.models.empty()) throw Failure(kExitInput, "bench needs at least one model");
  if (a.labels.empty())
    for (const auto& p : a.models) a.labels.push_back(std::filesystem::path(p).stem().string());
  if (a.labels.size() != a.models.size()) throw Failure(kExitInput, "one label per model");
  auto corpus = load_corpus(a.src, a.src, "");
  std::vector<Model> models;
  std::vector<const natkit_model*> ptrs;
  for (const auto& p : a.models) {
    Model m;
    check(natkit_model_load(p.c_str(), m.out()), "loading " + p);
    ptrs.push_back(m.get());
    models.push_back(std::move(m));
  }
  const auto labels = c_strs(a.labels);
  CString tsv;
  check(natkit_bench_decode(ptrs.data(), labels.data(), ptrs.size(), corpus.get(), a.runs, a.warmup, tsv.out()),
        "bench");
  write_text(a.out, tsv.str());
  return kExitOk;
}

// ---- analyze ----

struct AnalyzeArgs {
  std::string hyp, ref, out = "analysis";
  std::vector<double> edges;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto hyps = read_lines(a.hyp);
  const auto refs = read_lines(a.ref);
  check_aligned(hyps, refs, a.hyp, a.ref);
  std::map<std::size_t, std::size_t> hist;
  for (std::size_t i = 0; i < hyps.size(); ++i) ++hist[natkit_levenshtein_tokens(hyps[i].c_str(), refs[i].c_str())];
  std::string lev = "distance\tcount\n";
  for (const auto& [d, n] : hist) lev += std::to_string(d) + "\t" + std::to_string(n) + "\n";
  write_text(a.out + ".levenshtein.tsv", lev);

  const auto h = c_strs(hyps), r = c_strs(refs);
  Buckets b;
  check(natkit_bucketed_bleu(h.data(), r.data(), hyps.size(), a.edges.empty() ? nullptr : a.edges.data(),
                             a.edges.size(), b.out()),
        "bucketed BLEU");
  std::string tsv = "bucket\tn\tbleu\n";
  for (std::size_t k = 0; k < natkit_buckets_count(b.get()); ++k) {
    double lo, hi, bleu;
    std::size_t n;
    int has;
    check(natkit_buckets_get(b.get(), k, &lo, &hi, &n, &bleu, &has), "bucket");
    tsv += "[" + fmt("%g", lo) + "," + fmt("%g", hi) + ")\t" + std::to_string(n) + "\t" +
           (has ? fmt("%.2f", bleu) : std::string("null")) + "\n";
  }
  write_text(a.out + ".buckets.tsv", tsv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"natkit: non-autoregressive translation toolkit"};
  app.set_version_flag("--version", std::string(natkit_version()));
  app.set_config("--config", "", "INI config file ([command] sections)");
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "Global random seed")->capture_default_str();

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Corpus BLEU, chrF++ and TER with signatures");
  c_score->add_option("--hyp", score.hyp, "Hypothesis file")->required();
  c_score->add_option("--ref", score.ref, "Reference file")->required();
  c_score->add_option("--metrics", score.metrics, "Subset of bleu,chrfpp,ter")->delimiter(',')->capture_default_str();
  c_score->add_flag("--json", score.json, "JSON report array");
  c_score->add_option("-o,--out", score.out, "Output file (default stdout)");

  SignifArgs signif;
  auto* c_signif = app.add_subcommand("signif", "Mark a results table with paired bootstrap p-values");
  c_signif->add_option("--spec", signif.spec, "Table spec file")->required();
  c_signif->add_option("--ref", signif.ref, "Reference file")->required();
  c_signif->add_option("--metric", signif.metric, "bleu | chrfpp | ter")->capture_default_str();
  c_signif->add_option("--resamples", signif.resamples, "Bootstrap resamples")->capture_default_str();
  c_signif->add_option("-o,--out", signif.out, "Output TSV (default stdout)");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic parallel corpus");
  c_synth->add_option("--pairs", synth.pairs)->capture_default_str();
  c_synth->add_option("--min-len", synth.min_len)->capture_default_str();
  c_synth->add_option("--max-len", synth.max_len)->capture_default_str();
  c_synth->add_option("--modes", synth.modes, "1 or 2 teacher mappings")->capture_default_str();
  c_synth->add_option("--n-content", synth.n_content, "Content vocabulary size")->capture_default_str();
  c_synth->add_option("--heldout", synth.heldout, "Also write a train/test split")->capture_default_str();
  c_synth->add_option("--out", synth.out, "Output prefix")->required();

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train a micro model");
  c_train->add_option("--src", train.src, "Source file")->required();
  c_train->add_option("--tgt", train.tgt, "Target file")->required();
  c_train->add_option("--vocab", train.vocab, "Vocabulary file");
  c_train->add_option("--out", train.out, "Checkpoint path")->required();
  c_train->add_option("--log", train.log, "Per-step JSON lines log");
  add_model_options(c_train, train.model);
  add_train_options(c_train, train.train);

  DecodeArgs decode;
  auto* c_decode = app.add_subcommand("decode", "Decode a source file");
  c_decode->add_option("--model", decode.model, "Checkpoint")->required();
  c_decode->add_option("--input", decode.input, "Source file")->required();
  c_decode->add_option("-o,--out", decode.out, "Hypothesis file (default stdout)");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Train over a grid of one knob");
  c_sweep->add_option("--knob", sweep.knob, "dropout | adam_eps")->capture_default_str();
  c_sweep->add_option("--values", sweep.values, "Knob values (default grid per knob)")->delimiter(',');
  c_sweep->add_option("--src", sweep.src)->required();
  c_sweep->add_option("--tgt", sweep.tgt)->required();
  c_sweep->add_option("--vocab", sweep.vocab);
  c_sweep->add_option("--heldout", sweep.heldout, "Validation pairs split off the end")->capture_default_str();
  c_sweep->add_option("-o,--out", sweep.out, "Output TSV (default stdout)");
  add_model_options(c_sweep, sweep.model);
  add_train_options(c_sweep, sweep.train);

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench", "Batch-size-1 decoding latency");
  c_bench->add_option("--models", bench.models, "Checkpoints; the first is the base")->delimiter(',')->required();
  c_bench->add_option("--labels", bench.labels, "Labels (default file stems)")->delimiter(',');
  c_bench->add_option("--src", bench.src, "Source file")->required();
  c_bench->add_option("--runs", bench.runs)->capture_default_str();
  c_bench->add_option("--warmup", bench.warmup, "Warmup sentences")->capture_default_str();
  c_bench->add_option("-o,--out", bench.out, "Output TSV (default stdout)");

  AnalyzeArgs analyze;
  auto* c_analyze = app.add_subcommand("analyze", "Levenshtein histogram and length-bucketed BLEU");
  c_analyze->add_option("--hyp", analyze.hyp)->required();
  c_analyze->add_option("--ref", analyze.ref)->required();
  c_analyze->add_option("--edges", analyze.edges, "Bucket edges (default 0,10,20,30,40,50,inf)")->delimiter(',');
  c_analyze->add_option("--out", analyze.out, "Output prefix")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*c_score) return run_score(score);
    if (*c_signif) return run_signif(signif, seed);
    if (*c_synth) return run_synth(synth, seed);
    if (*c_train) return run_train(train, seed);
    if (*c_decode) return run_decode(decode);
    if (*c_sweep) return run_sweep(sweep, seed);
    if (*c_bench) return run_bench(bench);
    if (*c_analyze) return run_analyze(analyze);
  } catch (const Failure& f) {
    std::fprintf(stderr, "natkit: %s\n", f.what());
    return f.code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "natkit: internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
