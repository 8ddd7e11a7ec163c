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

#include "cmla/sentence.h"

#include "cmla/text.h"

namespace cmla {

std::vector<std::string> Sentence::Surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

std::string Sentence::SpanText(const Span& span) const {
  if (span.start >= span.end || span.end > tokens.size()) {
    throw std::out_of_range("span outside sentence " + id);
  }
  return Utf8Substr(raw_text, tokens[span.start].char_start,
                    tokens[span.end - 1].char_end);
}

LabelSeq Sentence::AspectLabels() const {
  return SpansToLabels(tokens.size(), aspect_spans, Head::kAspect);
}

LabelSeq Sentence::OpinionLabels() const {
  return SpansToLabels(tokens.size(), opinion_spans, Head::kOpinion);
}

std::vector<Sentence> ExcludeSources(std::vector<Sentence> sentences,
                                     const std::vector<std::string>& prefixes) {
  if (prefixes.empty()) return sentences;
  std::vector<Sentence> kept;
  for (Sentence& s : sentences) {
    bool excluded = false;
    for (const std::string& p : prefixes) {
      if (s.source_id.starts_with(p)) {
        excluded = true;
        break;
      }
    }
    if (!excluded) kept.push_back(std::move(s));
  }
  return kept;
}

DatasetStats ComputeStats(const std::vector<Sentence>& sentences) {
  DatasetStats stats;
  stats.sentences = sentences.size();
  for (const Sentence& s : sentences) {
    stats.tokens += s.tokens.size();
    stats.aspect_spans += s.aspect_spans.size();
    stats.opinion_spans += s.opinion_spans.size();
    if (s.aspect_spans.empty()) ++stats.sentences_without_aspects;
  }
  return stats;
}

}  // namespace cmla
