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

#ifndef CMLA_TRAIN_H_
#define CMLA_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cmla/bio.h"
#include "cmla/embeddings.h"
#include "cmla/model.h"
#include "cmla/sentence.h"
#include "cmla/tensor.h"

namespace cmla {

struct Example {
  Tensor embeddings;  // n x dim
  LabelSeq gold_a;
  LabelSeq gold_p;
  // Position of the source sentence in the dataset, for diagnostics.
  std::size_t index = 0;
};

// Sentences without tokens are skipped.
std::vector<Example> MakeExamples(std::span<const Sentence> sentences,
                                  const EmbeddingTable& embeddings);

struct TrainConfig {
  double lr = 0.07;
  std::size_t epochs = 30;
  std::uint64_t seed = 1;
  // Global gradient-norm cap; <= 0 disables clipping.
  double clip = 5.0;
  // Called after each epoch with its mean loss; returning false stops early.
  std::function<bool(std::size_t epoch, double mean_loss)> on_epoch;
};

struct TrainResult {
  CmlaParams params;
  std::vector<double> loss_trace;
};

// Per-sentence SGD in a seeded shuffled order. A non-finite loss throws
// NumericError naming the epoch and sentence index.
TrainResult Train(std::span<const Example> examples, CmlaParams params,
                  const TrainConfig& config);

// Loss of one example and its gradient for every parameter, in Named() order.
double LossAndGradients(const Example& example, const CmlaParams& params,
                        std::vector<Tensor>* gradients);

}  // namespace cmla

#endif  // CMLA_TRAIN_H_
