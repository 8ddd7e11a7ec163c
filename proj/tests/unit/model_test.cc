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

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "cmla/checkpoint.h"
#include "cmla/grad_check.h"
#include "cmla/model.h"
#include "cmla/predict.h"
#include "cmla/synthetic.h"
#include "cmla/text.h"
#include "cmla/train.h"
#include "doctest.h"
#include "test_util.h"

namespace cmla {
namespace {

using testing::MaxAbsDiff;
using testing::RandomTensor;

// Naive triple loop over sum_{i,j} h_i G[k,i,j] u_j.
double Bilinear(const Tensor& h, const Tensor& g, std::size_t k, const Tensor& u) {
  const std::size_t d = h.size();
  double total = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) total += h[i] * g[(k * d + i) * d + j] * u[j];
  }
  return total;
}

TEST_CASE("compose with zero tensors is zero") {
  Rng rng(1);
  Tensor h = RandomTensor({4}, rng), u = RandomTensor({4}, rng), w = RandomTensor({4}, rng);
  Tensor zero(Shape{3, 4, 4});
  CHECK(Compose(h, u, w, zero, zero) == Tensor(Shape{6}));
}

TEST_CASE("compose scalar case") {
  Tensor g = Tensor(Shape{1, 1, 1}, {2.0});
  Tensor d = Tensor(Shape{1, 1, 1}, {0.0});
  Tensor c = Compose(Tensor::Vector({0.5}), Tensor::Vector({1.0}), Tensor::Vector({3.0}), g, d);
  CHECK(c[0] == std::tanh(1.0));
  CHECK(c[1] == 0.0);
}

TEST_CASE("compose matches the triple-loop oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + rng.Index(6), k = 1 + rng.Index(4);
    Tensor h = RandomTensor({d}, rng), us = RandomTensor({d}, rng), uo = RandomTensor({d}, rng);
    Tensor g = RandomTensor({k, d, d}, rng), dd = RandomTensor({k, d, d}, rng);
    Tensor c = Compose(h, us, uo, g, dd);
    REQUIRE(c.size() == 2 * k);
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(std::abs(c[i] - std::tanh(Bilinear(h, g, i, us))) < 1e-12);
      CHECK(std::abs(c[k + i] - std::tanh(Bilinear(h, dd, i, uo))) < 1e-12);
    }
  }
}

TEST_CASE("compose rejects mismatched shapes") {
  Tensor g(Shape{2, 3, 3});
  CHECK_THROWS_AS(Compose(Tensor(Shape{4}), Tensor(Shape{3}), Tensor(Shape{3}), g, g), ShapeError);
  CHECK_THROWS_AS(Compose(Tensor(Shape{3}), Tensor(Shape{3}), Tensor(Shape{3}), g,
                          Tensor(Shape{2, 3, 4})),
                  ShapeError);
}

TEST_CASE("update_prototype cases") {
  Rng rng(3);
  Tensor u = RandomTensor({3}, rng);
  std::vector<Tensor> hs{RandomTensor({3}, rng), RandomTensor({3}, rng)};
  std::vector<double> w{0.25, 0.75};
  CHECK(UpdatePrototype(u, w, hs, Tensor(Shape{3, 3})) == u);

  std::vector<Tensor> one{Tensor::Vector({1.0, -2.0, 0.5})};
  std::vector<double> w1{1.0};
  Tensor got = UpdatePrototype(u, w1, one, Tensor::Identity(3));
  for (std::size_t i = 0; i < 3; ++i) CHECK(got[i] == u[i] + one[0][i]);

  std::vector<double> bad{0.5, 0.6};
  CHECK_THROWS_AS(UpdatePrototype(u, bad, hs, Tensor::Identity(3)), std::invalid_argument);
}

TEST_CASE("update_prototype matches a weighted-sum oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 1 + rng.Index(5), n = 1 + rng.Index(6);
    Tensor u = RandomTensor({d}, rng), v = RandomTensor({d, d}, rng);
    std::vector<Tensor> hs;
    std::vector<double> w(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      hs.push_back(RandomTensor({d}, rng));
      w[i] = rng.Uniform(0.01, 1.0);
      total += w[i];
    }
    for (double& x : w) x /= total;
    Tensor got = UpdatePrototype(u, w, hs, v);
    for (std::size_t r = 0; r < d; ++r) {
      double expected = u[r];
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < d; ++c) expected += w[i] * v.at(r, c) * hs[i][c];
      }
      CHECK(std::abs(got[r] - expected) < 1e-12);
    }
  }
}

TEST_CASE("loss limits and analytic value") {
  LabelSeq ga{{Tag::kB, Tag::kO}, Head::kAspect};
  LabelSeq gp{{Tag::kO, Tag::kI}, Head::kOpinion};
  Tensor perfect_a = Tensor::Matrix(2, 3, {0, -1000, -1000, -1000, -1000, 0});
  Tensor perfect_p = Tensor::Matrix(2, 3, {-1000, -1000, 0, -1000, 0, -1000});
  CHECK(Loss(perfect_a, perfect_p, ga, gp) < 1e-12);
  Tensor uniform(Shape{2, 3});
  CHECK(std::abs(Loss(uniform, uniform, ga, gp) - 2.0 * std::log(3.0)) < 1e-12);
}

TEST_CASE("loss matches a direct negative log-probability oracle") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng.Index(7);
    Tensor la = RandomTensor({n, 3}, rng, 4.0), lp = RandomTensor({n, 3}, rng, 4.0);
    LabelSeq ga{{}, Head::kAspect}, gp{{}, Head::kOpinion};
    for (std::size_t i = 0; i < n; ++i) {
      ga.labels.push_back(static_cast<Tag>(rng.Index(3)));
      gp.labels.push_back(static_cast<Tag>(rng.Index(3)));
    }
    double expected = 0.0;
    for (const auto& [l, gold] : {std::pair{&la, &ga}, std::pair{&lp, &gp}}) {
      double head = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double z = 0.0;
        for (std::size_t c = 0; c < 3; ++c) z += std::exp(l->at(i, c));
        head -= std::log(std::exp(l->at(i, static_cast<std::size_t>(gold->labels[i]))) / z);
      }
      expected += head / static_cast<double>(n);
    }
    CHECK(std::abs(Loss(la, lp, ga, gp) - expected) < 1e-12);
  }
}

TEST_CASE("init follows the documented scheme") {
  CmlaParams p = CmlaParams::Init(ModelConfig{10, 4, 2}, 9);
  CHECK_NOTHROW(p.Validate());
  for (double x : p.u_a.data()) CHECK(std::abs(x) <= 0.2);
  for (double x : p.u_p.data()) CHECK(std::abs(x) <= 0.2);
  CHECK(p.gru_ctx.b_z == Tensor(Shape{10}));
  CHECK(p.g_a.shape() == Shape{4, 10, 10});
  CHECK(p.gru_att_a.input_dim() == 8);
  CHECK(p.gru_att_a.hidden_dim() == 4);
  CHECK(p.v_p.shape() == Shape{3, 4});
  CHECK(p == CmlaParams::Init(ModelConfig{10, 4, 2}, 9));
  CHECK_FALSE(p == CmlaParams::Init(ModelConfig{10, 4, 2}, 10));
  CHECK_THROWS_AS(CmlaParams::Init(ModelConfig{0, 4, 2}, 1), std::invalid_argument);
}

TEST_CASE("named parameters cover every tensor once") {
  CmlaParams p = CmlaParams::Init(ModelConfig{3, 2, 2}, 1);
  auto named = p.Named();
  CHECK(named.size() == 6 + 27 + 4);
  CHECK(named.front().first == "u_a");
  CHECK(named.back().first == "update_p");
  std::set<std::string> names;
  for (const auto& [name, t] : named) names.insert(name);
  CHECK(names.size() == named.size());
  CHECK(names.count("gru_att_p.u_h") == 1);
}

Tensor AttentionFor(const CmlaParams& p, const Tensor& emb, Head head) {
  ForwardValues f = Forward(emb, p);
  return head == Head::kAspect ? f.attention_a : f.attention_p;
}

TEST_CASE("a single token gets all the attention") {
  CmlaParams p = CmlaParams::Init(ModelConfig{5, 3, 2}, 2);
  Rng rng(6);
  Tensor emb = RandomTensor({1, 5}, rng);
  CHECK(AttentionFor(p, emb, Head::kAspect)[0] == 1.0);
  CHECK(AttentionFor(p, emb, Head::kOpinion)[0] == 1.0);
}

TEST_CASE("zero parameters attend uniformly") {
  CmlaParams p = CmlaParams::Zeros(ModelConfig{4, 2, 2});
  Rng rng(7);
  Tensor emb = RandomTensor({5, 4}, rng);
  ForwardValues f = Forward(emb, p);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(f.attention_a[i] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(f.attention_p[i] == doctest::Approx(0.2).epsilon(1e-15));
  }
}

TEST_CASE("attention layer outputs have the documented shapes") {
  CmlaParams p = CmlaParams::Init(ModelConfig{4, 3, 2}, 8);
  Rng rng(8);
  Graph g;
  ParamVars v = AddToGraph(g, p, false);
  ForwardOutput out = Forward(g, v, g.Constant(RandomTensor({6, 4}, rng)), 2);
  REQUIRE(out.aspect_layers.size() == 2);
  const AttentionOutput& layer = out.aspect_layers[0];
  CHECK(g.value(layer.compositions).shape() == Shape{6, 6});
  CHECK(g.value(layer.features).shape() == Shape{6, 3});
  CHECK(g.value(layer.logits).shape() == Shape{6, 3});
  CHECK(g.value(layer.scores).shape() == Shape{6});
  CHECK(g.value(out.hidden).shape() == Shape{6, 4});
  const Tensor& logits = g.value(layer.logits);
  const Tensor& scores = g.value(layer.scores);
  for (std::size_t i = 0; i < 6; ++i) CHECK(scores[i] == std::max(logits.at(i, 0), logits.at(i, 1)));
}

TEST_CASE("distributions and attention are normalized on fuzzed inputs") {
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 1 + rng.Index(6), k = 1 + rng.Index(4), n = 1 + rng.Index(9);
    CmlaParams p = CmlaParams::Init(ModelConfig{d, k, 1 + rng.Index(3)}, rng.Next());
    ForwardValues f = Forward(RandomTensor({n, d}, rng, 2.0), p);
    double sa = 0.0, sp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sa += f.attention_a[i];
      sp += f.attention_p[i];
      double ra = 0.0, rp = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        ra += f.probs_a.at(i, c);
        rp += f.probs_p.at(i, c);
      }
      CHECK(std::abs(ra - 1.0) <= 1e-12);
      CHECK(std::abs(rp - 1.0) <= 1e-12);
    }
    CHECK(std::abs(sa - 1.0) <= 1e-12);
    CHECK(std::abs(sp - 1.0) <= 1e-12);
  }
}

// Inserts a copy of token `at` right after it; logits up to `at` must not
// change.
void CheckPrefixLabels(const CmlaParams& p, std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = 5, d = p.config.dim;
  Tensor emb = RandomTensor({n, d}, rng);
  const std::size_t at = rng.Index(n);
  Tensor dup(Shape{n + 1, d});
  for (std::size_t i = 0; i <= n; ++i) {
    const std::size_t src = i <= at ? i : i - 1;
    for (std::size_t c = 0; c < d; ++c) dup.at(i, c) = emb.at(src, c);
  }
  ForwardValues a = Forward(emb, p), b = Forward(dup, p);
  for (std::size_t i = 0; i <= at; ++i) {
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(a.logits_a.at(i, c) == b.logits_a.at(i, c));
      CHECK(a.logits_p.at(i, c) == b.logits_p.at(i, c));
    }
  }
}

TEST_CASE("duplicating a token leaves earlier labels alone") {
  SUBCASE("one layer") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      CheckPrefixLabels(CmlaParams::Init(ModelConfig{4, 3, 1}, s), s);
    }
  }
  SUBCASE("two layers without prototype feedback") {
    for (std::uint64_t s = 0; s < 10; ++s) {
      CmlaParams p = CmlaParams::Init(ModelConfig{4, 3, 2}, s);
      p.update_a = Tensor(Shape{4, 4});
      p.update_p = Tensor(Shape{4, 4});
      CheckPrefixLabels(p, s);
    }
  }
}

std::vector<Tensor> Flat(const CmlaParams& p) {
  std::vector<Tensor> out;
  for (const auto& [name, t] : p.Named()) out.push_back(*t);
  return out;
}

// Graph variables in Named() order, regrouped into ParamVars.
ParamVars Bind(std::span<const Var> v) {
  ParamVars pv;
  std::size_t i = 0;
  for (Var* x : {&pv.u_a, &pv.u_p, &pv.g_a, &pv.g_p, &pv.d_a, &pv.d_p}) *x = v[i++];
  for (GruVars* g : {&pv.gru_ctx, &pv.gru_att_a, &pv.gru_att_p}) {
    *g = GruVars{v[i], v[i + 1], v[i + 2], v[i + 3], v[i + 4], v[i + 5], v[i + 6], v[i + 7], v[i + 8]};
    i += 9;
  }
  for (Var* x : {&pv.v_a, &pv.v_p, &pv.update_a, &pv.update_p}) *x = v[i++];
  pv.all.assign(v.begin(), v.end());
  return pv;
}

TEST_CASE("full forward and backward pass gradient check") {
  const ModelConfig config{6, 3, 2};
  Rng rng(11);
  Tensor emb = RandomTensor({4, 6}, rng);
  LabelSeq ga{{Tag::kO, Tag::kB, Tag::kI, Tag::kO}, Head::kAspect};
  LabelSeq gp{{Tag::kB, Tag::kO, Tag::kO, Tag::kB}, Head::kOpinion};
  auto f = [&](Graph& g, std::span<const Var> vars) {
    ForwardOutput out = Forward(g, Bind(vars), g.Constant(emb), config.layers);
    return Loss(g, out.logits_a, out.logits_p, ga, gp);
  };
  std::vector<Tensor> params = Flat(CmlaParams::Init(config, 11));
  const GradCheckResult r = GradCheck(f, params);
  // u 2*6, G and D 4*3*36, context GRU 3*(36+36+6), attention GRUs 2*3*(18+9+3),
  // v 2*9, V 2*36.
  CHECK(r.coordinates_checked == 948);
  CHECK(r.max_relative_error < 1e-4);
}

TEST_CASE("LossAndGradients agrees with the graph loss") {
  const ModelConfig config{4, 2, 2};
  CmlaParams p = CmlaParams::Init(config, 12);
  Rng rng(12);
  Example ex{RandomTensor({3, 4}, rng), LabelSeq{{Tag::kB, Tag::kO, Tag::kO}, Head::kAspect},
             LabelSeq{{Tag::kO, Tag::kO, Tag::kB}, Head::kOpinion}, 0};
  std::vector<Tensor> grads;
  const double loss = LossAndGradients(ex, p, &grads);
  ForwardValues f = Forward(ex.embeddings, p);
  CHECK(std::abs(loss - Loss(f.logits_a, f.logits_p, ex.gold_a, ex.gold_p)) < 1e-12);
  CHECK(grads.size() == p.Named().size());
  CHECK(LossAndGradients(ex, p, nullptr) == loss);
}

SyntheticCorpus SmallCorpus() {
  SyntheticConfig c = SyntheticConfig::Default();
  c.n_sentences = 8;
  c.dim = 6;
  return GenerateSynthetic(c);
}

TEST_CASE("no parameter is dead on the synthetic fixture") {
  SyntheticCorpus corpus = SmallCorpus();
  std::vector<Example> examples = MakeExamples(corpus.sentences, corpus.embeddings);
  CmlaParams p = CmlaParams::Init(ModelConfig{6, 3, 2}, 3);
  auto named = p.Named();
  std::vector<double> mass(named.size(), 0.0);
  std::vector<Tensor> grads;
  for (const Example& ex : examples) {
    LossAndGradients(ex, p, &grads);
    for (std::size_t i = 0; i < grads.size(); ++i) {
      for (double x : grads[i].data()) mass[i] += std::abs(x);
    }
  }
  for (std::size_t i = 0; i < named.size(); ++i) {
    INFO(named[i].first);
    CHECK(mass[i] > 0.0);
  }
}

TEST_CASE("zero epochs leave parameters untouched") {
  SyntheticCorpus corpus = SmallCorpus();
  std::vector<Example> examples = MakeExamples(corpus.sentences, corpus.embeddings);
  CmlaParams p = CmlaParams::Init(ModelConfig{6, 3, 2}, 4);
  TrainConfig tc;
  tc.epochs = 0;
  TrainResult r = Train(examples, p, tc);
  CHECK(r.params == p);
  CHECK(r.loss_trace.empty());
}

TEST_CASE("training is deterministic and reduces the loss") {
  SyntheticCorpus corpus = SmallCorpus();
  std::vector<Example> examples = MakeExamples(corpus.sentences, corpus.embeddings);
  CmlaParams p = CmlaParams::Init(ModelConfig{6, 3, 2}, 5);
  TrainConfig tc;
  tc.epochs = 15;
  TrainResult a = Train(examples, p, tc);
  TrainResult b = Train(examples, p, tc);
  CHECK(a.loss_trace == b.loss_trace);
  CHECK(a.params == b.params);
  CHECK(a.loss_trace.size() == 15);
  CHECK(a.loss_trace.back() < a.loss_trace.front());

  tc.seed = 2;
  CHECK_FALSE(Train(examples, p, tc).params == a.params);
}

TEST_CASE("the epoch callback can stop training") {
  SyntheticCorpus corpus = SmallCorpus();
  std::vector<Example> examples = MakeExamples(corpus.sentences, corpus.embeddings);
  TrainConfig tc;
  tc.epochs = 50;
  tc.on_epoch = [](std::size_t epoch, double) { return epoch < 2; };
  CHECK(Train(examples, CmlaParams::Init(ModelConfig{6, 3, 2}, 6), tc).loss_trace.size() == 3);
}

TEST_CASE("a NaN loss names the sentence") {
  SyntheticCorpus corpus = SmallCorpus();
  std::vector<Example> examples = MakeExamples(corpus.sentences, corpus.embeddings);
  examples[3].embeddings[0] = std::nan("");
  try {
    Train(examples, CmlaParams::Init(ModelConfig{6, 3, 2}, 7), TrainConfig{});
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("sentence index 3") != std::string::npos);
  }
}

TEST_CASE("train argument checks") {
  std::vector<Example> none;
  CHECK_THROWS_AS(Train(none, CmlaParams::Init(ModelConfig{2, 1, 1}, 1), TrainConfig{}),
                  std::invalid_argument);
  SyntheticCorpus corpus = SmallCorpus();
  std::vector<Example> examples = MakeExamples(corpus.sentences, corpus.embeddings);
  TrainConfig bad;
  bad.lr = 0.0;
  CHECK_THROWS_AS(Train(examples, CmlaParams::Init(ModelConfig{6, 3, 2}, 1), bad),
                  std::invalid_argument);
}

TEST_CASE("checkpoints round-trip bitwise") {
  CmlaParams p = CmlaParams::Init(ModelConfig{5, 3, 2}, 13);
  std::stringstream buf;
  WriteCheckpoint(buf, p);
  const std::string bytes = buf.str();
  CmlaParams back = ReadCheckpoint(buf);
  CHECK(back == p);
  CHECK(back.config == p.config);
  std::stringstream again;
  WriteCheckpoint(again, back);
  CHECK(again.str() == bytes);
}

TEST_CASE("corrupt checkpoints are data errors") {
  CmlaParams p = CmlaParams::Init(ModelConfig{3, 2, 2}, 14);
  std::stringstream buf;
  WriteCheckpoint(buf, p);
  const std::string bytes = buf.str();
  auto read = [](std::string b) {
    std::istringstream in(b);
    return ReadCheckpoint(in);
  };
  CHECK_THROWS_AS(read(""), DataError);
  CHECK_THROWS_AS(read("NOTACKPT" + bytes.substr(8)), DataError);
  CHECK_THROWS_AS(read(bytes.substr(0, bytes.size() - 5)), DataError);
  std::string version = bytes;
  version[8] = 9;
  CHECK_THROWS_AS(read(version), DataError);
  CHECK_THROWS_AS(LoadCheckpoint("/nonexistent/model.ckpt"), DataError);
}

TEST_CASE("predict decodes spans and reports normalized scores") {
  SyntheticCorpus corpus = SmallCorpus();
  CmlaParams p = CmlaParams::Init(ModelConfig{6, 3, 2}, 15);
  for (const Sentence& s : corpus.sentences) {
    Prediction pred = Predict(s, corpus.embeddings, p);
    REQUIRE(pred.scores.size() == s.tokens.size());
    CHECK(pred.aspects == LabelsToSpans(pred.labels_a));
    CHECK(pred.opinions == LabelsToSpans(pred.labels_p));
    CHECK(LabelsToSpans(SpansToLabels(s.tokens.size(), pred.aspects, Head::kAspect)) ==
          pred.aspects);
    CHECK(MergedWellFormed(pred.merged));
    double sa = 0.0;
    for (const TokenScores& t : pred.scores) {
      sa += t.attention_a;
      CHECK(t.probs_a[0] + t.probs_a[1] + t.probs_a[2] == doctest::Approx(1.0));
    }
    CHECK(std::abs(sa - 1.0) < 1e-12);
  }
}

TEST_CASE("predict on an empty sentence is empty") {
  Sentence s;
  Prediction pred = Predict(s, EmbeddingTable(4), CmlaParams::Init(ModelConfig{4, 2, 2}, 1));
  CHECK(pred.aspects.empty());
  CHECK(pred.scores.empty());
}

TEST_CASE("predict may return no aspects for an all-O sentence") {
  CmlaParams p = CmlaParams::Zeros(ModelConfig{4, 2, 2});
  p.gru_att_a.b_h = Tensor::Filled({2}, 1.0);
  p.gru_att_a.b_z = Tensor::Filled({2}, 5.0);
  p.v_a = Tensor::Matrix(3, 2, {-1, -1, -1, -1, 1, 1});
  Sentence s;
  s.raw_text = "niets bijzonders vandaag";
  s.tokens = Tokenize(s.raw_text);
  Prediction pred = Predict(s, EmbeddingTable(4), p);
  CHECK(pred.aspects.empty());
  CHECK(pred.labels_a.WellFormed());
}

}  // namespace
}  // namespace cmla
