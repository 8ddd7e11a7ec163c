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

#include "cmla/gru.h"

#include <cmath>
#include <string>

namespace cmla {
namespace {

void Expect(const Tensor& t, const Shape& shape, const char* name) {
  if (t.shape() != shape) {
    throw ShapeError(std::string("gru parameter ") + name + " has shape " +
                     ShapeToString(t.shape()) + ", expected " +
                     ShapeToString(shape));
  }
}

Tensor Glorot(std::size_t rows, std::size_t cols, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  return InitUniform({rows, cols}, -limit, limit, rng);
}

// h' = (1 - z) * h + z * c
Var Interpolate(Graph& g, Var z, Var h_prev, Var candidate) {
  Var keep = g.AddConstant(g.Scale(z, -1.0), 1.0);
  return g.Add(g.Mul(keep, h_prev), g.Mul(z, candidate));
}

}  // namespace

GruParams GruParams::Zeros(std::size_t input_dim, std::size_t hidden_dim) {
  GruParams p;
  p.w_z = p.w_r = p.w_h = Tensor({hidden_dim, input_dim});
  p.u_z = p.u_r = p.u_h = Tensor({hidden_dim, hidden_dim});
  p.b_z = p.b_r = p.b_h = Tensor({hidden_dim});
  return p;
}

GruParams GruParams::Random(std::size_t input_dim, std::size_t hidden_dim,
                            Rng& rng) {
  GruParams p = Zeros(input_dim, hidden_dim);
  p.w_z = Glorot(hidden_dim, input_dim, rng);
  p.w_r = Glorot(hidden_dim, input_dim, rng);
  p.w_h = Glorot(hidden_dim, input_dim, rng);
  p.u_z = Glorot(hidden_dim, hidden_dim, rng);
  p.u_r = Glorot(hidden_dim, hidden_dim, rng);
  p.u_h = Glorot(hidden_dim, hidden_dim, rng);
  return p;
}

void GruParams::Validate() const {
  if (w_z.rank() != 2) throw ShapeError("gru parameter w_z must be a matrix");
  const std::size_t in = input_dim(), hid = hidden_dim();
  Expect(w_z, {hid, in}, "w_z");
  Expect(w_r, {hid, in}, "w_r");
  Expect(w_h, {hid, in}, "w_h");
  Expect(u_z, {hid, hid}, "u_z");
  Expect(u_r, {hid, hid}, "u_r");
  Expect(u_h, {hid, hid}, "u_h");
  Expect(b_z, {hid}, "b_z");
  Expect(b_r, {hid}, "b_r");
  Expect(b_h, {hid}, "b_h");
}

GruVars AddToGraph(Graph& g, const GruParams& p, bool requires_grad) {
  p.Validate();
  return GruVars{g.Leaf(p.w_z, requires_grad), g.Leaf(p.w_r, requires_grad),
                 g.Leaf(p.w_h, requires_grad), g.Leaf(p.u_z, requires_grad),
                 g.Leaf(p.u_r, requires_grad), g.Leaf(p.u_h, requires_grad),
                 g.Leaf(p.b_z, requires_grad), g.Leaf(p.b_r, requires_grad),
                 g.Leaf(p.b_h, requires_grad)};
}

Var GruStep(Graph& g, const GruVars& p, Var x, Var h_prev) {
  const std::size_t hidden = g.value(p.w_z).dim(0);
  if (g.value(x).rank() != 1 || g.value(x).size() != g.value(p.w_z).dim(1)) {
    throw ShapeError("gru step: input has shape " +
                     ShapeToString(g.value(x).shape()));
  }
  if (g.value(h_prev).shape() != Shape{hidden}) {
    throw ShapeError("gru step: hidden state has shape " +
                     ShapeToString(g.value(h_prev).shape()));
  }
  Var z = g.Sigmoid(g.Add(g.Add(g.MatMul(p.w_z, x), g.MatMul(p.u_z, h_prev)), p.b_z));
  Var r = g.Sigmoid(g.Add(g.Add(g.MatMul(p.w_r, x), g.MatMul(p.u_r, h_prev)), p.b_r));
  Var c = g.Tanh(g.Add(
      g.Add(g.MatMul(p.w_h, x), g.MatMul(p.u_h, g.Mul(r, h_prev))), p.b_h));
  return Interpolate(g, z, h_prev, c);
}

Var GruRun(Graph& g, const GruVars& p, Var xs, Var h0) {
  const Tensor& in = g.value(xs);
  if (in.rank() != 2) throw ShapeError("gru run: inputs must be an n x d matrix");
  if (in.dim(1) != g.value(p.w_z).dim(1)) {
    throw ShapeError("gru run: input width " + std::to_string(in.dim(1)) +
                     " does not match input_dim " +
                     std::to_string(g.value(p.w_z).dim(1)));
  }
  // Input projections for every step at once.
  Var proj_z = g.MatMul(xs, g.Transpose(p.w_z));
  Var proj_r = g.MatMul(xs, g.Transpose(p.w_r));
  Var proj_h = g.MatMul(xs, g.Transpose(p.w_h));

  std::vector<Var> states;
  states.reserve(in.dim(0));
  Var h = h0;
  for (std::size_t t = 0; t < in.dim(0); ++t) {
    Var z = g.Sigmoid(g.Add(g.Add(g.Row(proj_z, t), g.MatMul(p.u_z, h)), p.b_z));
    Var r = g.Sigmoid(g.Add(g.Add(g.Row(proj_r, t), g.MatMul(p.u_r, h)), p.b_r));
    Var c = g.Tanh(
        g.Add(g.Add(g.Row(proj_h, t), g.MatMul(p.u_h, g.Mul(r, h))), p.b_h));
    h = Interpolate(g, z, h, c);
    states.push_back(h);
  }
  return g.StackRows(states);
}

Tensor GruStep(const Tensor& x, const Tensor& h_prev, const GruParams& p) {
  Graph g;
  GruVars vars = AddToGraph(g, p, false);
  return g.value(GruStep(g, vars, g.Constant(x), g.Constant(h_prev)));
}

std::vector<Tensor> GruRun(std::span<const Tensor> xs, const GruParams& p) {
  return GruRun(xs, p, Tensor({p.hidden_dim()}));
}

std::vector<Tensor> GruRun(std::span<const Tensor> xs, const GruParams& p,
                           const Tensor& h0) {
  if (xs.empty()) throw std::invalid_argument("gru run: empty sequence");
  Graph g;
  GruVars vars = AddToGraph(g, p, false);
  std::vector<Var> rows;
  for (const Tensor& x : xs) rows.push_back(g.Constant(x));
  const Tensor& states = g.value(GruRun(g, vars, g.StackRows(rows), g.Constant(h0)));
  std::vector<Tensor> out;
  const std::size_t hid = states.dim(1);
  for (std::size_t t = 0; t < states.dim(0); ++t) {
    auto row = states.data().subspan(t * hid, hid);
    out.push_back(Tensor({hid}, std::vector<double>(row.begin(), row.end())));
  }
  return out;
}

}  // namespace cmla
