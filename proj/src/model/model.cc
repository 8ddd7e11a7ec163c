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

#include "cmla/model.h"

#include <cmath>
#include <stdexcept>

namespace cmla {
namespace {

constexpr double kPrototypeRange = 0.2;

Tensor Glorot(const Shape& shape, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return InitUniform(shape, -limit, limit, rng);
}

void Expect(const Tensor& t, const Shape& shape, const std::string& name) {
  if (t.shape() != shape) {
    throw ShapeError("parameter " + name + " has shape " + ShapeToString(t.shape()) +
                     ", expected " + ShapeToString(shape));
  }
}

void ExpectGru(const GruParams& p, std::size_t in, std::size_t hid,
               const std::string& name) {
  p.Validate();
  if (p.input_dim() != in || p.hidden_dim() != hid) {
    throw ShapeError(name + " is " + std::to_string(p.input_dim()) + " -> " +
                     std::to_string(p.hidden_dim()) + ", expected " +
                     std::to_string(in) + " -> " + std::to_string(hid));
  }
}

void AppendGru(std::vector<std::pair<std::string, Tensor*>>& out,
               const std::string& prefix, GruParams& p) {
  out.emplace_back(prefix + ".w_z", &p.w_z);
  out.emplace_back(prefix + ".w_r", &p.w_r);
  out.emplace_back(prefix + ".w_h", &p.w_h);
  out.emplace_back(prefix + ".u_z", &p.u_z);
  out.emplace_back(prefix + ".u_r", &p.u_r);
  out.emplace_back(prefix + ".u_h", &p.u_h);
  out.emplace_back(prefix + ".b_z", &p.b_z);
  out.emplace_back(prefix + ".b_r", &p.b_r);
  out.emplace_back(prefix + ".b_h", &p.b_h);
}

void AppendGruVars(std::vector<Var>& out, const GruVars& v) {
  out.insert(out.end(), {v.w_z, v.w_r, v.w_h, v.u_z, v.u_r, v.u_h, v.b_z, v.b_r, v.b_h});
}

std::vector<std::size_t> ClassIndices(const LabelSeq& labels) {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (Tag t : labels.labels) out.push_back(static_cast<std::size_t>(t));
  return out;
}

Var HeadLoss(Graph& g, Var logits, const LabelSeq& gold) {
  const std::size_t n = g.value(logits).dim(0);
  if (gold.size() != n) {
    throw std::invalid_argument("loss: " + std::to_string(n) + " logit rows but " +
                                std::to_string(gold.size()) + " gold labels");
  }
  const auto classes = ClassIndices(gold);
  Var picked = g.Pick(g.LogSoftmax(logits, 1), classes);
  return g.Scale(g.Sum(picked), -1.0 / static_cast<double>(n));
}

}  // namespace

CmlaParams CmlaParams::Zeros(const ModelConfig& config) {
  if (config.dim == 0 || config.k == 0 || config.layers == 0) {
    throw ShapeError("model dim, k and layers must be positive");
  }
  const std::size_t d = config.dim, k = config.k;
  CmlaParams p;
  p.config = config;
  p.u_a = p.u_p = Tensor({d});
  p.g_a = p.g_p = p.d_a = p.d_p = Tensor({k, d, d});
  p.gru_ctx = GruParams::Zeros(d, d);
  p.gru_att_a = p.gru_att_p = GruParams::Zeros(2 * k, k);
  p.v_a = p.v_p = Tensor({kNumTags, k});
  p.update_a = p.update_p = Tensor({d, d});
  return p;
}

CmlaParams CmlaParams::Init(const ModelConfig& config, std::uint64_t seed) {
  CmlaParams p = Zeros(config);
  const std::size_t d = config.dim, k = config.k;
  Rng rng(seed);
  p.u_a = InitUniform({d}, -kPrototypeRange, kPrototypeRange, rng);
  p.u_p = InitUniform({d}, -kPrototypeRange, kPrototypeRange, rng);
  p.g_a = Glorot({k, d, d}, d, d, rng);
  p.g_p = Glorot({k, d, d}, d, d, rng);
  p.d_a = Glorot({k, d, d}, d, d, rng);
  p.d_p = Glorot({k, d, d}, d, d, rng);
  p.gru_ctx = GruParams::Random(d, d, rng);
  p.gru_att_a = GruParams::Random(2 * k, k, rng);
  p.gru_att_p = GruParams::Random(2 * k, k, rng);
  p.v_a = Glorot({kNumTags, k}, k, kNumTags, rng);
  p.v_p = Glorot({kNumTags, k}, k, kNumTags, rng);
  p.update_a = Glorot({d, d}, d, d, rng);
  p.update_p = Glorot({d, d}, d, d, rng);
  return p;
}

void CmlaParams::Validate() const {
  const std::size_t d = config.dim, k = config.k;
  if (d == 0 || k == 0 || config.layers == 0) {
    throw ShapeError("model dim, k and layers must be positive");
  }
  Expect(u_a, {d}, "u_a");
  Expect(u_p, {d}, "u_p");
  Expect(g_a, {k, d, d}, "g_a");
  Expect(g_p, {k, d, d}, "g_p");
  Expect(d_a, {k, d, d}, "d_a");
  Expect(d_p, {k, d, d}, "d_p");
  ExpectGru(gru_ctx, d, d, "gru_ctx");
  ExpectGru(gru_att_a, 2 * k, k, "gru_att_a");
  ExpectGru(gru_att_p, 2 * k, k, "gru_att_p");
  Expect(v_a, {kNumTags, k}, "v_a");
  Expect(v_p, {kNumTags, k}, "v_p");
  Expect(update_a, {d, d}, "update_a");
  Expect(update_p, {d, d}, "update_p");
}

std::vector<std::pair<std::string, Tensor*>> CmlaParams::Named() {
  std::vector<std::pair<std::string, Tensor*>> out = {
      {"u_a", &u_a}, {"u_p", &u_p}, {"g_a", &g_a},
      {"g_p", &g_p}, {"d_a", &d_a}, {"d_p", &d_p},
  };
  AppendGru(out, "gru_ctx", gru_ctx);
  AppendGru(out, "gru_att_a", gru_att_a);
  AppendGru(out, "gru_att_p", gru_att_p);
  out.emplace_back("v_a", &v_a);
  out.emplace_back("v_p", &v_p);
  out.emplace_back("update_a", &update_a);
  out.emplace_back("update_p", &update_p);
  return out;
}

std::vector<std::pair<std::string, const Tensor*>> CmlaParams::Named() const {
  auto mutable_view = const_cast<CmlaParams*>(this)->Named();
  std::vector<std::pair<std::string, const Tensor*>> out;
  out.reserve(mutable_view.size());
  for (auto& [name, t] : mutable_view) out.emplace_back(std::move(name), t);
  return out;
}

bool operator==(const CmlaParams& a, const CmlaParams& b) {
  if (!(a.config == b.config)) return false;
  auto na = a.Named();
  auto nb = b.Named();
  for (std::size_t i = 0; i < na.size(); ++i) {
    if (!(*na[i].second == *nb[i].second)) return false;
  }
  return true;
}

ParamVars AddToGraph(Graph& g, const CmlaParams& params, bool requires_grad) {
  params.Validate();
  ParamVars v;
  v.u_a = g.Leaf(params.u_a, requires_grad);
  v.u_p = g.Leaf(params.u_p, requires_grad);
  v.g_a = g.Leaf(params.g_a, requires_grad);
  v.g_p = g.Leaf(params.g_p, requires_grad);
  v.d_a = g.Leaf(params.d_a, requires_grad);
  v.d_p = g.Leaf(params.d_p, requires_grad);
  v.gru_ctx = AddToGraph(g, params.gru_ctx, requires_grad);
  v.gru_att_a = AddToGraph(g, params.gru_att_a, requires_grad);
  v.gru_att_p = AddToGraph(g, params.gru_att_p, requires_grad);
  v.v_a = g.Leaf(params.v_a, requires_grad);
  v.v_p = g.Leaf(params.v_p, requires_grad);
  v.update_a = g.Leaf(params.update_a, requires_grad);
  v.update_p = g.Leaf(params.update_p, requires_grad);
  v.all = {v.u_a, v.u_p, v.g_a, v.g_p, v.d_a, v.d_p};
  AppendGruVars(v.all, v.gru_ctx);
  AppendGruVars(v.all, v.gru_att_a);
  AppendGruVars(v.all, v.gru_att_p);
  v.all.insert(v.all.end(), {v.v_a, v.v_p, v.update_a, v.update_p});
  return v;
}

Var Compose(Graph& g, Var h, Var u_self, Var u_other, Var own, Var cross) {
  const Tensor& hv = g.value(h);
  const Tensor& gv = g.value(own);
  if (gv.rank() != 3 || g.value(cross).shape() != gv.shape()) {
    throw ShapeError("compose: composition tensors must both be k x d x d");
  }
  const std::size_t k = gv.dim(0), d = gv.dim(1);
  if (hv.rank() != 2 || hv.dim(1) != d || gv.dim(2) != d ||
      g.value(u_self).shape() != Shape{d} || g.value(u_other).shape() != Shape{d}) {
    throw ShapeError("compose: dimension mismatch with d = " + std::to_string(d));
  }
  // Row k of each product is G_k u, so h . (G_k u) gives h^T G_k u.
  auto half = [&](Var tensor, Var u) {
    Var rows = g.Reshape(g.MatMul(g.Reshape(tensor, {k * d, d}), u), {k, d});
    return g.Tanh(g.MatMul(h, g.Transpose(rows)));
  };
  return g.Concat(half(own, u_self), half(cross, u_other));
}

AttentionOutput AttentionLayer(Graph& g, Var h, Var u_self, Var u_other,
                               Var own, Var cross, const GruVars& gru,
                               Var weights) {
  AttentionOutput out;
  out.compositions = Compose(g, h, u_self, u_other, own, cross);
  const std::size_t k = g.value(gru.w_z).dim(0);
  out.features = GruRun(g, gru, out.compositions, g.Constant(Tensor({k})));
  out.logits = g.MatMul(out.features, g.Transpose(weights));
  out.scores = g.RowMax(out.logits, static_cast<std::size_t>(Tag::kB),
                        static_cast<std::size_t>(Tag::kI) + 1);
  out.attention = g.Softmax(out.scores, 0);
  return out;
}

Var UpdatePrototype(Graph& g, Var u, Var weights, Var h, Var update) {
  Var pooled = g.MatMul(g.Transpose(h), weights);
  return g.Add(u, g.MatMul(update, pooled));
}

ForwardOutput Forward(Graph& g, const ParamVars& p, Var embeddings,
                      std::size_t layers) {
  const Tensor& emb = g.value(embeddings);
  if (emb.rank() != 2) throw ShapeError("forward: embeddings must be n x dim");
  if (layers == 0) throw std::invalid_argument("forward: need at least one layer");
  const std::size_t d = g.value(p.u_a).size();

  ForwardOutput out;
  out.hidden = GruRun(g, p.gru_ctx, embeddings, g.Constant(Tensor({d})));
  Var u_a = p.u_a, u_p = p.u_p;
  for (std::size_t layer = 0; layer < layers; ++layer) {
    AttentionOutput a =
        AttentionLayer(g, out.hidden, u_a, u_p, p.g_a, p.d_a, p.gru_att_a, p.v_a);
    AttentionOutput o =
        AttentionLayer(g, out.hidden, u_p, u_a, p.g_p, p.d_p, p.gru_att_p, p.v_p);
    out.aspect_layers.push_back(a);
    out.opinion_layers.push_back(o);
    // The update after the last layer would feed nothing.
    if (layer + 1 < layers) {
      Var next_a = UpdatePrototype(g, u_a, a.attention, out.hidden, p.update_a);
      Var next_p = UpdatePrototype(g, u_p, o.attention, out.hidden, p.update_p);
      u_a = next_a;
      u_p = next_p;
    }
  }
  out.logits_a = out.aspect_layers.back().logits;
  out.logits_p = out.opinion_layers.back().logits;
  out.probs_a = g.Softmax(out.logits_a, 1);
  out.probs_p = g.Softmax(out.logits_p, 1);
  out.attention_a = out.aspect_layers.back().attention;
  out.attention_p = out.opinion_layers.back().attention;
  return out;
}

Var Loss(Graph& g, Var logits_a, Var logits_p, const LabelSeq& gold_a,
         const LabelSeq& gold_p) {
  return g.Add(HeadLoss(g, logits_a, gold_a), HeadLoss(g, logits_p, gold_p));
}

Tensor Compose(const Tensor& h_i, const Tensor& u_self, const Tensor& u_other,
               const Tensor& own, const Tensor& cross) {
  if (h_i.rank() != 1) throw ShapeError("compose: h_i must be a vector");
  Graph g;
  Var h = g.Reshape(g.Constant(h_i), {1, h_i.size()});
  Var out = Compose(g, h, g.Constant(u_self), g.Constant(u_other),
                    g.Constant(own), g.Constant(cross));
  const Tensor& row = g.value(out);
  return Tensor({row.size()}, std::vector<double>(row.data().begin(), row.data().end()));
}

Tensor UpdatePrototype(const Tensor& u, std::span<const double> weights,
                       std::span<const Tensor> h_seq, const Tensor& update) {
  if (weights.size() != h_seq.size() || h_seq.empty()) {
    throw std::invalid_argument("update_prototype: need one weight per token");
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("update_prototype: weights sum to " +
                                std::to_string(total) + ", not 1");
  }
  Graph g;
  std::vector<Var> rows;
  for (const Tensor& h : h_seq) rows.push_back(g.Constant(h));
  Var out = UpdatePrototype(g, g.Constant(u),
                            g.Constant(Tensor::Vector({weights.begin(), weights.end()})),
                            g.StackRows(rows), g.Constant(update));
  return g.value(out);
}

double Loss(const Tensor& logits_a, const Tensor& logits_p,
            const LabelSeq& gold_a, const LabelSeq& gold_p) {
  Graph g;
  return g.value(Loss(g, g.Constant(logits_a), g.Constant(logits_p), gold_a, gold_p))
      .item();
}

ForwardValues Forward(const Tensor& embeddings, const CmlaParams& params) {
  Graph g;
  ParamVars p = AddToGraph(g, params, false);
  ForwardOutput out = Forward(g, p, g.Constant(embeddings), params.config.layers);
  return ForwardValues{g.value(out.logits_a),    g.value(out.logits_p),
                       g.value(out.probs_a),     g.value(out.probs_p),
                       g.value(out.attention_a), g.value(out.attention_p)};
}

}  // namespace cmla
