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

#ifndef CMLA_GRU_H_
#define CMLA_GRU_H_

#include <cstddef>
#include <span>
#include <vector>

#include "cmla/graph.h"
#include "cmla/tensor.h"

namespace cmla {

// Gated recurrent unit weights. Input maps are hidden x input, recurrent maps
// hidden x hidden, biases hidden.
//
//   z   = sigmoid(w_z x + u_z h + b_z)
//   r   = sigmoid(w_r x + u_r h + b_r)
//   c   = tanh(w_h x + u_h (r * h) + b_h)
//   h'  = (1 - z) * h + z * c
struct GruParams {
  Tensor w_z, w_r, w_h;
  Tensor u_z, u_r, u_h;
  Tensor b_z, b_r, b_h;

  static GruParams Zeros(std::size_t input_dim, std::size_t hidden_dim);
  // Glorot-uniform weights, zero biases.
  static GruParams Random(std::size_t input_dim, std::size_t hidden_dim,
                          Rng& rng);

  std::size_t input_dim() const { return w_z.dim(1); }
  std::size_t hidden_dim() const { return w_z.dim(0); }

  // Throws ShapeError unless all nine shapes agree with one (input, hidden).
  void Validate() const;
};

// GruParams placed in a graph.
struct GruVars {
  Var w_z, w_r, w_h;
  Var u_z, u_r, u_h;
  Var b_z, b_r, b_h;
};

GruVars AddToGraph(Graph& g, const GruParams& p, bool requires_grad);

// One step on vectors x (input_dim) and h_prev (hidden_dim).
Var GruStep(Graph& g, const GruVars& p, Var x, Var h_prev);

// Runs over the rows of xs (n x input_dim) starting from h0 and returns the
// n x hidden_dim matrix of hidden states.
Var GruRun(Graph& g, const GruVars& p, Var xs, Var h0);

// Value-level versions. h0 defaults to zeros.
Tensor GruStep(const Tensor& x, const Tensor& h_prev, const GruParams& p);
std::vector<Tensor> GruRun(std::span<const Tensor> xs, const GruParams& p);
std::vector<Tensor> GruRun(std::span<const Tensor> xs, const GruParams& p,
                           const Tensor& h0);

}  // namespace cmla

#endif  // CMLA_GRU_H_
