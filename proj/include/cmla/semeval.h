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

#ifndef CMLA_SEMEVAL_H_
#define CMLA_SEMEVAL_H_

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmla/sentence.h"

namespace cmla {

// [begin, end) in code points.
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

struct AlignResult {
  std::vector<Span> spans;
  // Indices of input spans that overlap no token.
  std::vector<std::size_t> failed;
};

// A token belongs to a span iff their character ranges overlap, so a span
// cutting a token in half takes the whole token.
AlignResult AlignSpans(std::span<const CharSpan> char_spans,
                       std::span<const Token> tokens, Head kind);

struct ParseResult {
  std::vector<Sentence> sentences;
  // One line per skipped sentence or dropped annotation.
  std::vector<std::string> diagnostics;
  std::size_t skipped_sentences = 0;
  std::size_t opinion_elements = 0;
  std::size_t null_targets = 0;
};

// Reads the SemEval review schema (Reviews/Review/sentences/sentence with
// text and Opinions/Opinion target/category/polarity/from/to); the older
// aspectTerms/aspectTerm layout is accepted too. NULL targets yield no span.
// Malformed XML throws DataError naming the line. A sentence whose offsets
// fall outside its text or disagree with the target is skipped and reported.
ParseResult ParseSemEvalXml(const std::filesystem::path& path);
ParseResult ParseSemEvalXmlString(std::string_view xml,
                                  std::string_view name = "<memory>");

// Writes sentences back in the review schema, one Opinion per aspect span.
void WriteSemEvalXml(std::ostream& out, std::span<const Sentence> sentences);

}  // namespace cmla

#endif  // CMLA_SEMEVAL_H_
