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

#include "cmla/train.h"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cmla {

std::vector<Example> MakeExamples(std::span<const Sentence> sentences,
                                  const EmbeddingTable& embeddings) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const Sentence& s = sentences[i];
    if (s.tokens.empty()) continue;
    const auto words = s.Surfaces();
    out.push_back(Example{embeddings.Embed(words), s.AspectLabels(),
                          s.OpinionLabels(), i});
  }
  return out;
}

double LossAndGradients(const Example& example, const CmlaParams& params,
                        std::vector<Tensor>* gradients) {
  Graph g;
  ParamVars vars = AddToGraph(g, params, gradients != nullptr);
  ForwardOutput out = Forward(g, vars, g.Constant(example.embeddings),
                              params.config.layers);
  Var loss = Loss(g, out.logits_a, out.logits_p, example.gold_a, example.gold_p);
  const double value = g.value(loss).item();
  if (gradients != nullptr && std::isfinite(value)) {
    Gradients grads = g.Backward(loss);
    gradients->clear();
    for (Var v : vars.all) gradients->push_back(grads[v]);
  }
  return value;
}

TrainResult Train(std::span<const Example> examples, CmlaParams params,
                  const TrainConfig& config) {
  if (examples.empty()) throw std::invalid_argument("train: empty dataset");
  if (!(config.lr > 0)) throw std::invalid_argument("train: lr must be positive");
  params.Validate();

  TrainResult result;
  Rng rng(config.seed);
  std::vector<std::size_t> order(examples.size());
  std::vector<Tensor> grads;
  auto named = params.Named();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[rng.Index(i)]);
    }

    double total = 0.0;
    for (std::size_t idx : order) {
      const Example& ex = examples[idx];
      const double loss = LossAndGradients(ex, params, &grads);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite loss " << loss << " at epoch " << epoch
            << ", sentence index " << ex.index;
        throw NumericError(msg.str());
      }
      total += loss;

      double norm_sq = 0.0;
      for (const Tensor& gt : grads) {
        for (double x : gt.data()) norm_sq += x * x;
      }
      const double norm = std::sqrt(norm_sq);
      double step = config.lr;
      if (config.clip > 0 && norm > config.clip) step *= config.clip / norm;
      for (std::size_t p = 0; p < named.size(); ++p) {
        auto values = named[p].second->data();
        auto g = grads[p].data();
        for (std::size_t i = 0; i < values.size(); ++i) values[i] -= step * g[i];
      }
    }
    const double mean = total / static_cast<double>(examples.size());
    result.loss_trace.push_back(mean);
    if (config.on_epoch && !config.on_epoch(epoch, mean)) break;
  }
  result.params = std::move(params);
  return result;
}

}  // namespace cmla
