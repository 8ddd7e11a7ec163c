// Copyright 2026 The CMLA Authors.
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

#ifndef CMLA_TEXT_H_
#define CMLA_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cmla/sentence.h"

namespace cmla {

// A decoded code point and the byte range it occupies.
struct CodePoint {
  char32_t value;
  std::size_t byte_start;
  std::size_t byte_end;
};

// Lenient UTF-8 decoding: an invalid byte decodes to itself as one code point.
std::vector<CodePoint> DecodeUtf8(std::string_view text);
std::size_t CodePointLength(std::string_view text);
// Substring by code point offsets [begin, end).
std::string Utf8Substr(std::string_view text, std::size_t begin, std::size_t end);
// Lowercases ASCII and Latin-1 letters; other code points pass through.
std::string Lowercase(std::string_view text);

// Maximal runs of letters/digits are tokens, every punctuation mark is its
// own token and whitespace separates. Offsets are code points.
std::vector<Token> Tokenize(std::string_view text);

}  // namespace cmla

#endif  // CMLA_TEXT_H_
