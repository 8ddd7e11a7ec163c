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

#ifndef CMLA_SENTENCE_H_
#define CMLA_SENTENCE_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cmla/bio.h"

namespace cmla {

// Malformed input file or record.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A token with [char_start, char_end) offsets counted in code points of the
// sentence text, the unit SemEval from/to attributes use.
struct Token {
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::string id;
  // Review (document) the sentence came from; used by source filters.
  std::string source_id;
  std::string raw_text;
  std::vector<Token> tokens;
  std::vector<Span> aspect_spans;
  std::vector<Span> opinion_spans;

  std::vector<std::string> Surfaces() const;
  // Text covered by a token span, taken from raw_text.
  std::string SpanText(const Span& span) const;
  LabelSeq AspectLabels() const;
  LabelSeq OpinionLabels() const;
  const std::vector<Span>& SpansOf(Head head) const {
    return head == Head::kAspect ? aspect_spans : opinion_spans;
  }
};

// Keeps sentences whose source_id starts with none of the prefixes.
std::vector<Sentence> ExcludeSources(std::vector<Sentence> sentences,
                                     const std::vector<std::string>& prefixes);

struct DatasetStats {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t aspect_spans = 0;
  std::size_t opinion_spans = 0;
  std::size_t sentences_without_aspects = 0;
};

DatasetStats ComputeStats(const std::vector<Sentence>& sentences);

}  // namespace cmla

#endif  // CMLA_SENTENCE_H_
