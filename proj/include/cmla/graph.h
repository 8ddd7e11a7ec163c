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

#ifndef CMLA_GRAPH_H_
#define CMLA_GRAPH_H_

#include <cstddef>
#include <deque>
#include <span>
#include <unordered_map>
#include <vector>

#include "cmla/tensor.h"

namespace cmla {

// Handle to a node in a Graph. Only meaningful for the graph that made it.
struct Var {
  std::size_t id = 0;
};

// Leaf gradients produced by Graph::Backward, keyed by node id.
class Gradients {
 public:
  const Tensor& operator[](Var v) const;
  bool contains(Var v) const { return grads_.count(v.id) > 0; }
  std::size_t size() const { return grads_.size(); }

 private:
  friend class Graph;
  std::unordered_map<std::size_t, Tensor> grads_;
};

// Append-only tape for reverse-mode differentiation. Every primitive
// evaluates eagerly and records what it needs for its gradient rule, so
// node order is a topological order by construction.
class Graph {
 public:
  enum class Op {
    kLeaf,
    kMatMul,
    kAdd,
    kSub,
    kMul,
    kScale,
    kAddConstant,
    kTanh,
    kSigmoid,
    kTranspose,
    kReshape,
    kRow,
    kStackRows,
    kConcat,
    kRowMax,
    kSoftmax,
    kLogSoftmax,
    kSum,
    kPick,
  };

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  // Parameter or input. Leaves with requires_grad receive gradients.
  Var Leaf(Tensor value, bool requires_grad = true);
  Var Constant(Tensor value) { return Leaf(std::move(value), false); }

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  Op op(Var v) const { return nodes_.at(v.id).op; }
  std::span<const std::size_t> inputs(Var v) const {
    return nodes_.at(v.id).inputs;
  }
  std::size_t size() const { return nodes_.size(); }

  // (m x k)(k x n) -> m x n and (m x k)(k) -> m.
  Var MatMul(Var a, Var b);

  // Elementwise, shapes must match.
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Scale(Var a, double factor);
  Var AddConstant(Var a, double constant);
  Var Tanh(Var a);
  Var Sigmoid(Var a);

  Var Transpose(Var a);
  Var Reshape(Var a, Shape shape);
  // Row i of a matrix as a vector.
  Var Row(Var a, std::size_t i);
  // Equal-length vectors stacked as matrix rows.
  Var StackRows(std::span<const Var> rows);
  // Concatenation along the last axis (vectors, or matrices with equal rows).
  Var Concat(Var a, Var b);
  // Per-row maximum over columns [begin, end) of a matrix.
  Var RowMax(Var a, std::size_t begin, std::size_t end);

  // axis 0 of a vector, or axis 0/1 of a matrix.
  Var Softmax(Var a, int axis);
  Var LogSoftmax(Var a, int axis);

  Var Sum(Var a);
  // out[i] = a[i, columns[i]] for a matrix a.
  Var Pick(Var a, std::span<const std::size_t> columns);

  // Reverse accumulation from a scalar. Every requires_grad leaf gets an
  // entry, zero when the loss does not depend on it.
  Gradients Backward(Var loss) const;

 private:
  struct Node {
    Op op = Op::kLeaf;
    std::vector<std::size_t> inputs;
    Tensor value;
    bool requires_grad = false;
    double constant = 0.0;
    std::size_t begin = 0;
    std::size_t end = 0;
    int axis = 0;
    std::vector<std::size_t> indices;
  };

  Var Push(Node node);
  const Node& node(Var v) const { return nodes_.at(v.id); }
  void Propagate(const Node& n, const Tensor& grad,
                 std::vector<Tensor>& grads,
                 std::vector<bool>& has_grad) const;

  // Deque so references returned by value() survive later ops.
  std::deque<Node> nodes_;
};

}  // namespace cmla

#endif  // CMLA_GRAPH_H_
