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

#ifndef CMLA_MODEL_H_
#define CMLA_MODEL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmla/bio.h"
#include "cmla/graph.h"
#include "cmla/gru.h"
#include "cmla/tensor.h"

namespace cmla {

struct ModelConfig {
  // Word representation size; equals the embedding dimension.
  std::size_t dim = 200;
  // Number of compositions per prototype.
  std::size_t k = 20;
  std::size_t layers = 2;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// All learnable parameters of the coupled attention network. Suffix _a is
// the aspect head, _p the opinion head.
struct CmlaParams {
  ModelConfig config;
  Tensor u_a, u_p;      // prototypes, dim
  Tensor g_a, g_p;      // own-prototype compositions, k x dim x dim
  Tensor d_a, d_p;      // cross-prototype compositions, k x dim x dim
  GruParams gru_ctx;    // dim -> dim over word embeddings
  GruParams gru_att_a;  // 2k -> k over composition vectors
  GruParams gru_att_p;
  Tensor v_a, v_p;            // 3 x k, features to {B, I, O} scores
  Tensor update_a, update_p;  // dim x dim, prototype feedback

  // Prototypes from U[-0.2, 0.2]; matrices Glorot-uniform; biases zero.
  static CmlaParams Init(const ModelConfig& config, std::uint64_t seed);
  static CmlaParams Zeros(const ModelConfig& config);

  // Throws ShapeError unless every tensor agrees with config.
  void Validate() const;

  // Stable (name, tensor) order shared by training and checkpoints.
  std::vector<std::pair<std::string, Tensor*>> Named();
  std::vector<std::pair<std::string, const Tensor*>> Named() const;

  friend bool operator==(const CmlaParams& a, const CmlaParams& b);
};

// CmlaParams as graph leaves; `all` follows Named() order.
struct ParamVars {
  Var u_a, u_p, g_a, g_p, d_a, d_p;
  GruVars gru_ctx, gru_att_a, gru_att_p;
  Var v_a, v_p, update_a, update_p;
  std::vector<Var> all;
};

ParamVars AddToGraph(Graph& g, const CmlaParams& params, bool requires_grad);

// Rows of h (n x dim) composed with both prototypes: column k of the first
// half is tanh(h_i . G_k u_self), of the second half tanh(h_i . D_k u_other).
Var Compose(Graph& g, Var h, Var u_self, Var u_other, Var own, Var cross);

struct AttentionOutput {
  Var compositions;  // n x 2k
  Var features;      // n x k, the GRU states r_i
  Var logits;        // n x 3 over {B, I, O}
  Var scores;        // n, max of the B and I logits
  Var attention;     // n, softmax of scores across tokens
};

AttentionOutput AttentionLayer(Graph& g, Var h, Var u_self, Var u_other,
                               Var own, Var cross, const GruVars& gru,
                               Var weights);

// u + sum_i w_i (V h_i)
Var UpdatePrototype(Graph& g, Var u, Var weights, Var h, Var update);

struct ForwardOutput {
  Var hidden;  // n x dim context-encoded words
  std::vector<AttentionOutput> aspect_layers;
  std::vector<AttentionOutput> opinion_layers;
  Var logits_a, logits_p;  // last layer, n x 3
  Var probs_a, probs_p;    // per-token class distributions
  Var attention_a, attention_p;
};

// embeddings is n x dim.
ForwardOutput Forward(Graph& g, const ParamVars& p, Var embeddings,
                      std::size_t layers);

// Mean per-token cross-entropy of each head, summed over the two heads.
Var Loss(Graph& g, Var logits_a, Var logits_p, const LabelSeq& gold_a,
         const LabelSeq& gold_p);

// Value-level entry points.
Tensor Compose(const Tensor& h_i, const Tensor& u_self, const Tensor& u_other,
               const Tensor& own, const Tensor& cross);
// Throws std::invalid_argument if weights do not sum to 1 within 1e-9.
Tensor UpdatePrototype(const Tensor& u, std::span<const double> weights,
                       std::span<const Tensor> h_seq, const Tensor& update);
double Loss(const Tensor& logits_a, const Tensor& logits_p,
            const LabelSeq& gold_a, const LabelSeq& gold_p);

struct ForwardValues {
  Tensor logits_a, logits_p;
  Tensor probs_a, probs_p;
  Tensor attention_a, attention_p;
};

ForwardValues Forward(const Tensor& embeddings, const CmlaParams& params);

}  // namespace cmla

#endif  // CMLA_MODEL_H_
