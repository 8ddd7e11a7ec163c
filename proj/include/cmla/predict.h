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

#ifndef CMLA_PREDICT_H_
#define CMLA_PREDICT_H_

#include <array>
#include <cstddef>
#include <vector>

#include "cmla/bio.h"
#include "cmla/embeddings.h"
#include "cmla/model.h"
#include "cmla/sentence.h"

namespace cmla {

struct TokenScores {
  std::size_t token_index = 0;
  std::array<double, kNumTags> logits_a{};
  std::array<double, kNumTags> logits_p{};
  std::array<double, kNumTags> probs_a{};
  std::array<double, kNumTags> probs_p{};
  // Normalized across the sentence; each column sums to 1.
  double attention_a = 0.0;
  double attention_p = 0.0;
};

struct Prediction {
  LabelSeq labels_a{{}, Head::kAspect};
  LabelSeq labels_p{{}, Head::kOpinion};
  std::vector<Span> aspects;
  std::vector<Span> opinions;
  std::vector<MergedTag> merged;
  std::vector<TokenScores> scores;
};

// Argmax per head, decoded to spans. Unknown words resolve through the
// table's OOV policy. A sentence without tokens yields an empty prediction.
Prediction Predict(const Sentence& sentence, const EmbeddingTable& embeddings,
                   const CmlaParams& params);

}  // namespace cmla

#endif  // CMLA_PREDICT_H_
