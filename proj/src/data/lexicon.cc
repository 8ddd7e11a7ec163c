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

#include "cmla/lexicon.h"

#include <algorithm>
#include <fstream>

#include "cmla/text.h"

namespace cmla {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

OpinionLexicon::OpinionLexicon(const std::vector<std::string>& words) {
  for (const std::string& w : words) {
    std::string_view trimmed = Trim(w);
    if (trimmed.empty()) continue;
    if (trimmed.find_first_of(" \t") != std::string_view::npos) {
      throw DataError("lexicon entry \"" + w + "\" contains whitespace");
    }
    entries_.insert(Lowercase(trimmed));
  }
}

bool OpinionLexicon::Contains(std::string_view word) const {
  return entries_.count(Lowercase(word)) > 0;
}

OpinionLexicon LoadLexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return ReadLexicon(in, path.string());
}

OpinionLexicon ReadLexicon(std::istream& in, std::string_view name) {
  std::vector<std::string> words;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view w = Trim(line);
    if (w.empty() || w.front() == '#') continue;
    if (w.find_first_of(" \t") != std::string_view::npos) {
      throw DataError(std::string(name) + ":" + std::to_string(line_no) +
                      ": lexicon entry contains whitespace");
    }
    words.emplace_back(w);
  }
  return OpinionLexicon(words);
}

void AnnotateOpinions(std::vector<Sentence>& sentences,
                      const OpinionLexicon& lexicon) {
  if (lexicon.empty()) throw std::invalid_argument("opinion lexicon is empty");
  for (Sentence& s : sentences) {
    std::vector<bool> covered(s.tokens.size(), false);
    for (const Span& span : s.opinion_spans) {
      for (std::size_t i = span.start; i < span.end && i < covered.size(); ++i) covered[i] = true;
    }
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (!covered[i] && lexicon.Contains(s.tokens[i].text)) {
        s.opinion_spans.push_back(Span{i, i + 1, Head::kOpinion});
      }
    }
    std::sort(s.opinion_spans.begin(), s.opinion_spans.end());
  }
}

}  // namespace cmla
