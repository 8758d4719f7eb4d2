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

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "natkit/natkit.h"

namespace natkit_cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

inline int exit_code(natkit_status s) {
  switch (s) {
    case NATKIT_OK: return kExitOk;
    case NATKIT_ERR_INVALID_ARGUMENT:
    case NATKIT_ERR_INFEASIBLE:
    case NATKIT_ERR_IO:
    case NATKIT_ERR_FORMAT: return kExitInput;
    default: return kExitInternal;
  }
}

inline void check(natkit_status s, const std::string& context) {
  if (s != NATKIT_OK) throw Failure(exit_code(s), context + ": " + natkit_last_error());
}

// Owns a natkit string.
class CString {
 public:
  CString() = default;
  ~CString() { natkit_string_free(p_); }
  CString(const CString&) = delete;
  CString& operator=(const CString&) = delete;
  char** out() { return &p_; }
  std::string str() const { return p_ ? std::string(p_) : std::string(); }

 private:
  char* p_ = nullptr;
};

template <class T, void (*Free)(T*)>
class Handle {
 public:
  Handle() = default;
  explicit Handle(T* p) : p_(p) {}
  ~Handle() { Free(p_); }
  Handle(Handle&& o) noexcept : p_(o.p_) { o.p_ = nullptr; }
  Handle& operator=(Handle&& o) noexcept {
    std::swap(p_, o.p_);
    return *this;
  }
  T* get() const { return p_; }
  T** out() { return &p_; }

 private:
  T* p_ = nullptr;
};

using Corpus = Handle<natkit_corpus, natkit_corpus_free>;
using Model = Handle<natkit_model, natkit_model_free>;
using Report = Handle<natkit_report, natkit_report_free>;
using Table = Handle<natkit_table, natkit_table_free>;
using Buckets = Handle<natkit_buckets, natkit_buckets_free>;

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(kExitInput, "cannot open '" + path + "' for reading");
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

inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Failure(kExitInput, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Failure(kExitInternal, "write failed: " + path);
}

inline std::vector<const char*> c_strs(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

inline void check_aligned(const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
                          const std::string& hyp_path, const std::string& ref_path) {
  if (hyps.size() != refs.size()) {
    throw Failure(kExitInput, "line count mismatch: " + hyp_path + " has " + std::to_string(hyps.size()) +
                                  " lines, " + ref_path + " has " + std::to_string(refs.size()));
  }
}

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace natkit_cli
