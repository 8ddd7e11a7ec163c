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

#ifndef CMLA_LEXICON_H_
#define CMLA_LEXICON_H_

#include <filesystem>
#include <istream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cmla/sentence.h"

namespace cmla {

// Fixed opinion word list, stored lowercase.
class OpinionLexicon {
 public:
  OpinionLexicon() = default;
  // Throws DataError for entries containing whitespace.
  explicit OpinionLexicon(const std::vector<std::string>& words);

  bool Contains(std::string_view word) const;
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::set<std::string>& entries() const { return entries_; }

 private:
  std::set<std::string> entries_;
};

// One word per line; blank lines and lines starting with '#' ignored.
OpinionLexicon LoadLexicon(const std::filesystem::path& path);
OpinionLexicon ReadLexicon(std::istream& in, std::string_view name);

// Every token whose lowercase form is listed becomes a one-token opinion
// span, unless an existing opinion span already covers it.
void AnnotateOpinions(std::vector<Sentence>& sentences,
                      const OpinionLexicon& lexicon);

}  // namespace cmla

#endif  // CMLA_LEXICON_H_
