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

#include "cmla/graph.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cmla {
namespace {

void RequireRank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " +
                     std::to_string(rank) + ", got shape " +
                     ShapeToString(t.shape()));
  }
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     ShapeToString(a.shape()) + " vs " +
                     ShapeToString(b.shape()));
  }
}

Tensor TransposeValue(const Tensor& a) {
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  Tensor out(Shape{cols, rows});
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out.at(c, r) = a.at(r, c);
  }
  return out;
}

// a (m x k) times b (k x n), or b a k-vector.
Tensor MatMulValue(const Tensor& a, const Tensor& b) {
  const std::size_t m = a.dim(0), k = a.dim(1);
  if (b.dim(0) != k) {
    throw ShapeError("matmul: inner dimensions disagree " +
                     ShapeToString(a.shape()) + " x " +
                     ShapeToString(b.shape()));
  }
  const std::size_t n = b.rank() == 2 ? b.dim(1) : 1;
  Tensor out(b.rank() == 2 ? Shape{m, n} : Shape{m});
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  double* po = out.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = pa[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = pb + p * n;
      double* orow = po + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  }
  return out;
}

void AccumulateInto(Tensor& dst, const Tensor& src) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

// Groups of a softmax along an axis: count, length, stride and the offset of
// each group's first element.
struct AxisGroups {
  std::size_t count;
  std::size_t length;
  std::size_t stride;
  std::size_t Offset(std::size_t g) const {
    return stride == 1 ? g * length : g;
  }
};

AxisGroups GroupsFor(const Tensor& t, int axis) {
  if (t.rank() == 1 && axis == 0) return {1, t.dim(0), 1};
  if (t.rank() == 2 && axis == 1) return {t.dim(0), t.dim(1), 1};
  if (t.rank() == 2 && axis == 0) return {t.dim(1), t.dim(0), t.dim(1)};
  throw ShapeError("softmax: axis " + std::to_string(axis) +
                   " invalid for shape " + ShapeToString(t.shape()));
}

}  // namespace

const Tensor& Gradients::operator[](Var v) const {
  auto it = grads_.find(v.id);
  if (it == grads_.end()) {
    throw std::out_of_range("no gradient recorded for node " +
                            std::to_string(v.id));
  }
  return it->second;
}

Var Graph::Push(Node node) {
  for (std::size_t in : node.inputs) {
    if (nodes_[in].requires_grad) node.requires_grad = true;
  }
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Var Graph::Leaf(Tensor value, bool requires_grad) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  return Push(std::move(n));
}

Var Graph::MatMul(Var a, Var b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  RequireRank(va, 2, "matmul");
  if (vb.rank() != 1 && vb.rank() != 2) {
    throw ShapeError("matmul: right operand must be a vector or matrix");
  }
  Node n;
  n.op = Op::kMatMul;
  n.inputs = {a.id, b.id};
  n.value = MatMulValue(va, vb);
  return Push(std::move(n));
}

Var Graph::Add(Var a, Var b) {
  RequireSameShape(value(a), value(b), "add");
  Node n;
  n.op = Op::kAdd;
  n.inputs = {a.id, b.id};
  n.value = value(a);
  AccumulateInto(n.value, value(b));
  return Push(std::move(n));
}

Var Graph::Sub(Var a, Var b) {
  RequireSameShape(value(a), value(b), "sub");
  Node n;
  n.op = Op::kSub;
  n.inputs = {a.id, b.id};
  n.value = value(a);
  auto out = n.value.data();
  auto rhs = value(b).data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= rhs[i];
  return Push(std::move(n));
}

Var Graph::Mul(Var a, Var b) {
  RequireSameShape(value(a), value(b), "mul");
  Node n;
  n.op = Op::kMul;
  n.inputs = {a.id, b.id};
  n.value = value(a);
  auto out = n.value.data();
  auto rhs = value(b).data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= rhs[i];
  return Push(std::move(n));
}

Var Graph::Scale(Var a, double factor) {
  Node n;
  n.op = Op::kScale;
  n.inputs = {a.id};
  n.constant = factor;
  n.value = value(a);
  for (double& x : n.value.data()) x *= factor;
  return Push(std::move(n));
}

Var Graph::AddConstant(Var a, double constant) {
  Node n;
  n.op = Op::kAddConstant;
  n.inputs = {a.id};
  n.constant = constant;
  n.value = value(a);
  for (double& x : n.value.data()) x += constant;
  return Push(std::move(n));
}

Var Graph::Tanh(Var a) {
  Node n;
  n.op = Op::kTanh;
  n.inputs = {a.id};
  n.value = value(a);
  for (double& x : n.value.data()) x = std::tanh(x);
  return Push(std::move(n));
}

Var Graph::Sigmoid(Var a) {
  Node n;
  n.op = Op::kSigmoid;
  n.inputs = {a.id};
  n.value = value(a);
  for (double& x : n.value.data()) {
    // Split by sign so exp never overflows.
    if (x >= 0) {
      x = 1.0 / (1.0 + std::exp(-x));
    } else {
      const double e = std::exp(x);
      x = e / (1.0 + e);
    }
  }
  return Push(std::move(n));
}

Var Graph::Transpose(Var a) {
  RequireRank(value(a), 2, "transpose");
  Node n;
  n.op = Op::kTranspose;
  n.inputs = {a.id};
  n.value = TransposeValue(value(a));
  return Push(std::move(n));
}

Var Graph::Reshape(Var a, Shape shape) {
  const Tensor& va = value(a);
  std::vector<double> data(va.data().begin(), va.data().end());
  Node n;
  n.op = Op::kReshape;
  n.inputs = {a.id};
  n.value = Tensor(std::move(shape), std::move(data));
  return Push(std::move(n));
}

Var Graph::Row(Var a, std::size_t i) {
  const Tensor& va = value(a);
  RequireRank(va, 2, "row");
  if (i >= va.dim(0)) throw ShapeError("row: index out of range");
  const std::size_t cols = va.dim(1);
  auto src = va.data().subspan(i * cols, cols);
  Node n;
  n.op = Op::kRow;
  n.inputs = {a.id};
  n.begin = i;
  n.value = Tensor(Shape{cols}, std::vector<double>(src.begin(), src.end()));
  return Push(std::move(n));
}

Var Graph::StackRows(std::span<const Var> rows) {
  if (rows.empty()) throw ShapeError("stack_rows: no rows");
  const std::size_t cols = value(rows[0]).size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  Node n;
  n.op = Op::kStackRows;
  for (Var r : rows) {
    const Tensor& vr = value(r);
    RequireRank(vr, 1, "stack_rows");
    if (vr.size() != cols) throw ShapeError("stack_rows: ragged rows");
    data.insert(data.end(), vr.data().begin(), vr.data().end());
    n.inputs.push_back(r.id);
  }
  n.value = Tensor(Shape{rows.size(), cols}, std::move(data));
  return Push(std::move(n));
}

Var Graph::Concat(Var a, Var b) {
  const Tensor& va = value(a);
  const Tensor& vb = value(b);
  if (va.rank() != vb.rank() || va.rank() == 0 || va.rank() > 2 ||
      (va.rank() == 2 && va.dim(0) != vb.dim(0))) {
    throw ShapeError("concat: incompatible shapes " +
                     ShapeToString(va.shape()) + " and " +
                     ShapeToString(vb.shape()));
  }
  const std::size_t rows = va.rank() == 2 ? va.dim(0) : 1;
  const std::size_t ca = va.size() / rows, cb = vb.size() / rows;
  std::vector<double> data;
  data.reserve(va.size() + vb.size());
  for (std::size_t r = 0; r < rows; ++r) {
    auto ra = va.data().subspan(r * ca, ca);
    auto rb = vb.data().subspan(r * cb, cb);
    data.insert(data.end(), ra.begin(), ra.end());
    data.insert(data.end(), rb.begin(), rb.end());
  }
  Node n;
  n.op = Op::kConcat;
  n.inputs = {a.id, b.id};
  n.value = va.rank() == 2 ? Tensor(Shape{rows, ca + cb}, std::move(data))
                           : Tensor(Shape{ca + cb}, std::move(data));
  return Push(std::move(n));
}

Var Graph::RowMax(Var a, std::size_t begin, std::size_t end) {
  const Tensor& va = value(a);
  RequireRank(va, 2, "row_max");
  if (begin >= end || end > va.dim(1)) {
    throw ShapeError("row_max: invalid column range");
  }
  const std::size_t rows = va.dim(0);
  Node n;
  n.op = Op::kRowMax;
  n.inputs = {a.id};
  n.value = Tensor(Shape{rows});
  n.indices.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t best = begin;
    for (std::size_t c = begin + 1; c < end; ++c) {
      if (va.at(r, c) > va.at(r, best)) best = c;
    }
    n.indices[r] = best;
    n.value[r] = va.at(r, best);
  }
  return Push(std::move(n));
}

Var Graph::Softmax(Var a, int axis) {
  const Tensor& va = value(a);
  const AxisGroups g = GroupsFor(va, axis);
  Node n;
  n.op = Op::kSoftmax;
  n.inputs = {a.id};
  n.axis = axis;
  n.value = va;
  auto out = n.value.data();
  for (std::size_t k = 0; k < g.count; ++k) {
    const std::size_t base = g.Offset(k);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.length; ++i) {
      mx = std::max(mx, out[base + i * g.stride]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < g.length; ++i) {
      double& x = out[base + i * g.stride];
      x = std::exp(x - mx);
      total += x;
    }
    for (std::size_t i = 0; i < g.length; ++i) out[base + i * g.stride] /= total;
  }
  return Push(std::move(n));
}

Var Graph::LogSoftmax(Var a, int axis) {
  const Tensor& va = value(a);
  const AxisGroups g = GroupsFor(va, axis);
  Node n;
  n.op = Op::kLogSoftmax;
  n.inputs = {a.id};
  n.axis = axis;
  n.value = va;
  auto out = n.value.data();
  for (std::size_t k = 0; k < g.count; ++k) {
    const std::size_t base = g.Offset(k);
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.length; ++i) {
      mx = std::max(mx, out[base + i * g.stride]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < g.length; ++i) {
      total += std::exp(out[base + i * g.stride] - mx);
    }
    const double lse = mx + std::log(total);
    for (std::size_t i = 0; i < g.length; ++i) out[base + i * g.stride] -= lse;
  }
  return Push(std::move(n));
}

Var Graph::Sum(Var a) {
  double total = 0.0;
  for (double x : value(a).data()) total += x;
  Node n;
  n.op = Op::kSum;
  n.inputs = {a.id};
  n.value = Tensor::Scalar(total);
  return Push(std::move(n));
}

Var Graph::Pick(Var a, std::span<const std::size_t> columns) {
  const Tensor& va = value(a);
  RequireRank(va, 2, "pick");
  if (columns.size() != va.dim(0)) {
    throw ShapeError("pick: need one column per row");
  }
  Node n;
  n.op = Op::kPick;
  n.inputs = {a.id};
  n.indices.assign(columns.begin(), columns.end());
  n.value = Tensor(Shape{columns.size()});
  for (std::size_t r = 0; r < columns.size(); ++r) {
    if (columns[r] >= va.dim(1)) throw ShapeError("pick: column out of range");
    n.value[r] = va.at(r, columns[r]);
  }
  return Push(std::move(n));
}

Gradients Graph::Backward(Var loss) const {
  if (value(loss).rank() != 0) {
    throw ShapeError("backward: loss must be a scalar, got shape " +
                     ShapeToString(value(loss).shape()));
  }
  std::vector<Tensor> grads(nodes_.size());
  std::vector<bool> has_grad(nodes_.size(), false);
  grads[loss.id] = Tensor::Scalar(1.0);
  has_grad[loss.id] = true;

  for (std::size_t id = loss.id + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (!has_grad[id] || !n.requires_grad || n.op == Op::kLeaf) continue;
    Propagate(n, grads[id], grads, has_grad);
  }

  Gradients out;
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (n.op != Op::kLeaf || !n.requires_grad) continue;
    out.grads_.emplace(id, has_grad[id] ? std::move(grads[id])
                                        : Tensor(n.value.shape()));
  }
  return out;
}

void Graph::Propagate(const Node& n, const Tensor& grad,
                      std::vector<Tensor>& grads,
                      std::vector<bool>& has_grad) const {
  auto accumulate = [&](std::size_t id, Tensor g) {
    if (!nodes_[id].requires_grad) return;
    if (has_grad[id]) {
      AccumulateInto(grads[id], g);
    } else {
      grads[id] = std::move(g);
      has_grad[id] = true;
    }
  };
  auto wants = [&](std::size_t i) { return nodes_[n.inputs[i]].requires_grad; };
  const Tensor& y = n.value;

  switch (n.op) {
    case Op::kLeaf:
      break;
    case Op::kMatMul: {
      const Tensor& a = nodes_[n.inputs[0]].value;
      const Tensor& b = nodes_[n.inputs[1]].value;
      if (b.rank() == 2) {
        if (wants(0)) accumulate(n.inputs[0], MatMulValue(grad, TransposeValue(b)));
        if (wants(1)) accumulate(n.inputs[1], MatMulValue(TransposeValue(a), grad));
      } else {
        if (wants(0)) {
          Tensor da(a.shape());
          for (std::size_t i = 0; i < a.dim(0); ++i) {
            for (std::size_t j = 0; j < a.dim(1); ++j) da.at(i, j) = grad[i] * b[j];
          }
          accumulate(n.inputs[0], std::move(da));
        }
        if (wants(1)) accumulate(n.inputs[1], MatMulValue(TransposeValue(a), grad));
      }
      break;
    }
    case Op::kAdd:
      accumulate(n.inputs[0], grad);
      accumulate(n.inputs[1], grad);
      break;
    case Op::kSub: {
      accumulate(n.inputs[0], grad);
      if (wants(1)) {
        Tensor neg = grad;
        for (double& x : neg.data()) x = -x;
        accumulate(n.inputs[1], std::move(neg));
      }
      break;
    }
    case Op::kMul: {
      for (int side = 0; side < 2; ++side) {
        if (!wants(side)) continue;
        Tensor g = grad;
        auto other = nodes_[n.inputs[1 - side]].value.data();
        auto gd = g.data();
        for (std::size_t i = 0; i < gd.size(); ++i) gd[i] *= other[i];
        accumulate(n.inputs[side], std::move(g));
      }
      break;
    }
    case Op::kScale: {
      Tensor g = grad;
      for (double& x : g.data()) x *= n.constant;
      accumulate(n.inputs[0], std::move(g));
      break;
    }
    case Op::kAddConstant:
      accumulate(n.inputs[0], grad);
      break;
    case Op::kTanh: {
      Tensor g = grad;
      auto gd = g.data();
      for (std::size_t i = 0; i < gd.size(); ++i) gd[i] *= 1.0 - y[i] * y[i];
      accumulate(n.inputs[0], std::move(g));
      break;
    }
    case Op::kSigmoid: {
      Tensor g = grad;
      auto gd = g.data();
      for (std::size_t i = 0; i < gd.size(); ++i) gd[i] *= y[i] * (1.0 - y[i]);
      accumulate(n.inputs[0], std::move(g));
      break;
    }
    case Op::kTranspose:
      accumulate(n.inputs[0], TransposeValue(grad));
      break;
    case Op::kReshape: {
      const Tensor& src = nodes_[n.inputs[0]].value;
      accumulate(n.inputs[0],
                 Tensor(src.shape(), std::vector<double>(grad.data().begin(),
                                                         grad.data().end())));
      break;
    }
    case Op::kRow: {
      const Tensor& src = nodes_[n.inputs[0]].value;
      Tensor g(src.shape());
      const std::size_t cols = src.dim(1);
      std::copy(grad.data().begin(), grad.data().end(),
                g.data().begin() + static_cast<std::ptrdiff_t>(n.begin * cols));
      accumulate(n.inputs[0], std::move(g));
      break;
    }
    case Op::kStackRows: {
      const std::size_t cols = y.dim(1);
      for (std::size_t r = 0; r < n.inputs.size(); ++r) {
        if (!wants(r)) continue;
        auto src = grad.data().subspan(r * cols, cols);
        accumulate(n.inputs[r],
                   Tensor(Shape{cols}, std::vector<double>(src.begin(), src.end())));
      }
      break;
    }
    case Op::kConcat: {
      const Tensor& a = nodes_[n.inputs[0]].value;
      const Tensor& b = nodes_[n.inputs[1]].value;
      const std::size_t rows = a.rank() == 2 ? a.dim(0) : 1;
      const std::size_t ca = a.size() / rows, cb = b.size() / rows;
      Tensor ga(a.shape()), gb(b.shape());
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < ca; ++c) ga[r * ca + c] = grad[r * (ca + cb) + c];
        for (std::size_t c = 0; c < cb; ++c) {
          gb[r * cb + c] = grad[r * (ca + cb) + ca + c];
        }
      }
      accumulate(n.inputs[0], std::move(ga));
      accumulate(n.inputs[1], std::move(gb));
      break;
    }
    case Op::kRowMax: {
      const Tensor& src = nodes_[n.inputs[0]].value;
      Tensor g(src.shape());
      for (std::size_t r = 0; r < n.indices.size(); ++r) g.at(r, n.indices[r]) = grad[r];
      accumulate(n.inputs[0], std::move(g));
      break;
    }
    case Op::kSoftmax: {
      const AxisGroups gr = GroupsFor(y, n.axis);
      Tensor g = grad;
      auto gd = g.data();
      for (std::size_t k = 0; k < gr.count; ++k) {
        const std::size_t base = gr.Offset(k);
        double dot = 0.0;
        for (std::size_t i = 0; i < gr.length; ++i) {
          const std::size_t at = base + i * gr.stride;
          dot += grad[at] * y[at];
        }
        for (std::size_t i = 0; i < gr.length; ++i) {
          const std::size_t at = base + i * gr.stride;
          gd[at] = y[at] * (grad[at] - dot);
        }
      }
      accumulate(n.inputs[0], std::move(g));
      break;
    }
    case Op::kLogSoftmax: {
      const AxisGroups gr = GroupsFor(y, n.axis);
      Tensor g = grad;
      auto gd = g.data();
      for (std::size_t k = 0; k < gr.count; ++k) {
        const std::size_t base = gr.Offset(k);
        double total = 0.0;
        for (std::size_t i = 0; i < gr.length; ++i) total += grad[base + i * gr.stride];
        for (std::size_t i = 0; i < gr.length; ++i) {
          const std::size_t at = base + i * gr.stride;
          gd[at] = grad[at] - std::exp(y[at]) * total;
        }
      }
      accumulate(n.inputs[0], std::move(g));
      break;
    }
    case Op::kSum: {
      const Tensor& src = nodes_[n.inputs[0]].value;
      accumulate(n.inputs[0], Tensor::Filled(src.shape(), grad.item()));
      break;
    }
    case Op::kPick: {
      const Tensor& src = nodes_[n.inputs[0]].value;
      Tensor g(src.shape());
      for (std::size_t r = 0; r < n.indices.size(); ++r) g.at(r, n.indices[r]) = grad[r];
      accumulate(n.inputs[0], std::move(g));
      break;
    }
  }
}

}  // namespace cmla
