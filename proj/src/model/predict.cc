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

#include "cmla/predict.h"

namespace cmla {
namespace {

std::size_t ArgMax(const std::array<double, kNumTags>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

Prediction Predict(const Sentence& sentence, const EmbeddingTable& embeddings,
                   const CmlaParams& params) {
  Prediction out;
  const std::size_t n = sentence.tokens.size();
  if (n == 0) return out;

  const auto words = sentence.Surfaces();
  const ForwardValues fwd = Forward(embeddings.Embed(words), params);

  std::vector<double> conf_a(n), conf_p(n);
  for (std::size_t i = 0; i < n; ++i) {
    TokenScores ts;
    ts.token_index = i;
    for (std::size_t c = 0; c < kNumTags; ++c) {
      ts.logits_a[c] = fwd.logits_a.at(i, c);
      ts.logits_p[c] = fwd.logits_p.at(i, c);
      ts.probs_a[c] = fwd.probs_a.at(i, c);
      ts.probs_p[c] = fwd.probs_p.at(i, c);
    }
    ts.attention_a = fwd.attention_a[i];
    ts.attention_p = fwd.attention_p[i];

    const std::size_t best_a = ArgMax(ts.probs_a);
    const std::size_t best_p = ArgMax(ts.probs_p);
    out.labels_a.labels.push_back(static_cast<Tag>(best_a));
    out.labels_p.labels.push_back(static_cast<Tag>(best_p));
    conf_a[i] = ts.probs_a[best_a];
    conf_p[i] = ts.probs_p[best_p];
    out.scores.push_back(ts);
  }
  out.aspects = LabelsToSpans(out.labels_a);
  out.opinions = LabelsToSpans(out.labels_p);
  out.merged = MergeHeads(out.labels_a, out.labels_p, conf_a, conf_p);
  return out;
}

}  // namespace cmla
