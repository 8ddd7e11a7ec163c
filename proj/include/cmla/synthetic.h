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

#ifndef CMLA_SYNTHETIC_H_
#define CMLA_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "cmla/embeddings.h"
#include "cmla/lexicon.h"
#include "cmla/sentence.h"

namespace cmla {

// Sentences are drawn by filling the ASPECT and OPINION slots of a random
// template with random vocabulary entries. Aspect entries may span several
// words ("wine list").
struct SyntheticConfig {
  std::size_t n_sentences = 20;
  std::uint64_t seed = 42;
  std::size_t dim = 16;
  // Embedding entries are drawn from U[-scale, scale].
  double scale = 1.0;
  std::vector<std::string> templates;
  std::vector<std::string> aspects;
  std::vector<std::string> opinions;

  // The 20-sentence restaurant fixture used by the acceptance suite.
  static SyntheticConfig Default();
  // Throws std::invalid_argument if a template lacks a slot or a list is empty.
  void Validate() const;
};

struct SyntheticCorpus {
  std::vector<Sentence> sentences;
  EmbeddingTable embeddings{1};
  OpinionLexicon lexicon;
};

SyntheticCorpus GenerateSynthetic(const SyntheticConfig& config);

// Flat "key = value" lines, '#' comments. Keys: sentences, seed, dim, scale,
// template (repeatable), aspects and opinions (comma-separated). Unknown keys
// throw DataError. Absent keys keep Default() values.
SyntheticConfig ReadSyntheticConfig(std::istream& in, std::string_view name);
SyntheticConfig LoadSyntheticConfig(const std::filesystem::path& path);

// Distinct U[-scale, scale] vectors for each word, drawn in sorted order.
EmbeddingTable RandomEmbeddings(std::vector<std::string> vocabulary,
                                std::size_t dim, double scale,
                                std::uint64_t seed);

}  // namespace cmla

#endif  // CMLA_SYNTHETIC_H_
