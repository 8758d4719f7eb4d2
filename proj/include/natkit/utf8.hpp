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

#include <string>
#include <string_view>

namespace natkit::utf8 {

// Decodes UTF-8 into code points. Undecodable bytes are kept as lone
// surrogates U+DC80..U+DCFF so that encode(decode(s)) == s for any input.
std::u32string decode(std::string_view bytes);
std::string encode(std::u32string_view code_points);

// Python str.isspace() for a single code point.
bool is_space(char32_t c);

}  // namespace natkit::utf8
