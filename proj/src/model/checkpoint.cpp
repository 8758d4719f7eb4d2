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
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "natkit/error.hpp"
#include "natkit/model.hpp"

namespace natkit::model {
namespace {

constexpr const char* kMagic = "natkit-model 1";

std::string join_flags(const std::vector<bool>& flags) {
  std::string s;
  for (bool f : flags) s += f ? '1' : '0';
  return s;
}

std::map<std::string, std::string> config_fields(const ModelConfig& c) {
  return {
      {"d_model", std::to_string(c.d_model)},
      {"enc_layers", std::to_string(c.enc_layers)},
      {"dec_layers", std::to_string(c.dec_layers)},
      {"activation", to_string(c.activation)},
      {"init", to_string(c.init)},
      {"dropout", [&] { char b[40]; std::snprintf(b, sizeof b, "%a", c.dropout); return std::string(b); }()},
      {"dec_self_attention", join_flags(c.dec_self_attention)},
      {"decoder_input", to_string(c.decoder_input)},
      {"mode", to_string(c.mode)},
      {"upsample", std::to_string(c.upsample)},
      {"length_bound", std::to_string(c.length_bound)},
      {"length_offset", c.length_offset ? "1" : "0"},
      {"deep_supervision", c.deep_supervision ? "1" : "0"},
      {"max_positions", std::to_string(c.max_positions)},
  };
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw FormatError("checkpoint: bad integer for " + key + ": " + v);
  }
}

double to_double(const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') throw FormatError("checkpoint: bad number: " + v);
  return x;
}

ModelConfig parse_config(const std::map<std::string, std::string>& kv) {
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError(std::string("checkpoint: missing config key ") + key);
    return it->second;
  };
  ModelConfig c;
  c.d_model = to_int("d_model", get("d_model"));
  c.enc_layers = to_int("enc_layers", get("enc_layers"));
  c.dec_layers = to_int("dec_layers", get("dec_layers"));
  c.activation = parse_activation(get("activation"));
  c.init = parse_init(get("init"));
  c.dropout = to_double(get("dropout"));
  for (char f : get("dec_self_attention")) {
    if (f != '0' && f != '1') throw FormatError("checkpoint: bad dec_self_attention flags");
    c.dec_self_attention.push_back(f == '1');
  }
  c.decoder_input = parse_decoder_input(get("decoder_input"));
  c.mode = parse_output_mode(get("mode"));
  c.upsample = to_int("upsample", get("upsample"));
  c.length_bound = to_int("length_bound", get("length_bound"));
  c.length_offset = get("length_offset") == "1";
  c.deep_supervision = get("deep_supervision") == "1";
  c.max_positions = to_int("max_positions", get("max_positions"));
  return c;
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
  std::ostringstream out;
  out << kMagic << '\n';
  for (const auto& [k, v] : config_fields(model.config)) out << k << '=' << v << '\n';
  out << "vocab " << model.vocab.size() << '\n';
  for (const auto& t : model.vocab.tokens()) out << t << '\n';
  std::size_t count = 0;
  model.params.for_each([&](const std::string&, const Matrix&) { ++count; });
  out << "tensors " << count << '\n';
  char buf[40];
  model.params.for_each([&](const std::string& name, const Matrix& m) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        std::snprintf(buf, sizeof buf, "%a", m(r, c));
        out << (c ? " " : "") << buf;
      }
      out << '\n';
    }
  });
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << out.str();
  if (!f) throw IoError("write failed: " + path);
}

Model load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot read " + path);
  std::string line;
  if (!std::getline(f, line) || line != kMagic) throw FormatError(path + ": not a natkit checkpoint");

  std::map<std::string, std::string> kv;
  while (std::getline(f, line) && line.rfind("vocab ", 0) != 0) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(path + ": bad config line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!f) throw FormatError(path + ": truncated header");
  const int nvocab = to_int("vocab", line.substr(6));
  std::vector<std::string> tokens;
  for (int i = 0; i < nvocab; ++i) {
    if (!std::getline(f, line)) throw FormatError(path + ": truncated vocabulary");
    tokens.push_back(line);
  }
  Model model;
  model.vocab = Vocabulary(std::move(tokens));
  model.config = config_for(model.vocab, parse_config(kv));
  model.params = init_params(model.config, 0);

  if (!std::getline(f, line) || line.rfind("tensors ", 0) != 0) throw FormatError(path + ": missing tensors");
  std::size_t expected = 0;
  model.params.for_each([&](const std::string&, const Matrix&) { ++expected; });
  if (static_cast<std::size_t>(to_int("tensors", line.substr(8))) != expected)
    throw FormatError(path + ": tensor count does not match the config");
  model.params.for_each([&](const std::string& name, Matrix& m) {
    std::string got;
    Eigen::Index rows = 0, cols = 0;
    if (!(f >> got >> rows >> cols)) throw FormatError(path + ": truncated tensor header");
    if (got != name || rows != m.rows() || cols != m.cols())
      throw FormatError(path + ": unexpected tensor " + got + ", wanted " + name);
    std::string v;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      if (!(f >> v)) throw FormatError(path + ": truncated tensor " + name);
      m.data()[i] = to_double(v);
    }
  });
  return model;
}

}  // namespace natkit::model
