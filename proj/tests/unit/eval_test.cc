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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cmla/metrics.h"
#include "cmla/semeval.h"
#include "cmla/synthetic.h"
#include "cmla/text.h"
#include "doctest.h"
#include "test_util.h"

namespace cmla {
namespace {

using SpanLists = std::vector<std::vector<Span>>;

Span A(std::size_t s, std::size_t e) { return Span{s, e, Head::kAspect}; }

// Counts by exhaustive pairwise comparison.
ChunkMetrics BruteForce(const SpanLists& gold, const SpanLists& pred) {
  ChunkMetrics m;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    for (const Span& p : pred[s]) {
      bool hit = false;
      for (const Span& g : gold[s]) hit |= g.start == p.start && g.end == p.end && g.kind == p.kind;
      hit ? ++m.tp : ++m.fp;
    }
    for (const Span& g : gold[s]) {
      bool hit = false;
      for (const Span& p : pred[s]) hit |= g.start == p.start && g.end == p.end && g.kind == p.kind;
      if (!hit) ++m.fn;
    }
  }
  return m;
}

std::vector<Span> RandomSpans(Rng& rng, std::size_t n) {
  std::vector<Span> out;
  std::size_t pos = rng.Index(3);
  while (pos < n) {
    const std::size_t len = 1 + rng.Index(std::min<std::size_t>(3, n - pos));
    out.push_back(A(pos, pos + len));
    pos += len + rng.Index(3);
  }
  return out;
}

TEST_CASE("score_chunks hand cases") {
  SpanLists gold{{A(0, 1), A(3, 5)}};
  SpanLists pred{{A(0, 1), A(2, 3)}};
  ChunkMetrics m = ScoreChunks(gold, pred);
  CHECK(m.tp == 1);
  CHECK(m.fp == 1);
  CHECK(m.fn == 1);
  CHECK(m.precision() == 50.0);
  CHECK(m.recall() == 50.0);
  CHECK(m.f1() == 50.0);
}

TEST_CASE("identity and empty predictions") {
  SpanLists gold{{A(0, 1), A(3, 5)}, {}, {A(2, 4)}};
  ChunkMetrics same = ScoreChunks(gold, gold);
  CHECK(same.precision() == 100.0);
  CHECK(same.recall() == 100.0);
  CHECK(same.f1() == 100.0);
  SpanLists empty(3);
  ChunkMetrics none = ScoreChunks(gold, empty);
  CHECK(none.precision() == 0.0);
  CHECK(none.recall() == 0.0);
  CHECK(none.f1() == 0.0);
  CHECK(ScoreChunks(empty, empty).f1() == 0.0);
  CHECK_THROWS_AS(ScoreChunks(gold, SpanLists(2)), std::invalid_argument);
}

TEST_CASE("score_chunks agrees with brute force on fuzzed pairs") {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t sentences = 1 + rng.Index(5);
    SpanLists gold, pred;
    for (std::size_t s = 0; s < sentences; ++s) {
      const std::size_t n = 1 + rng.Index(10);
      gold.push_back(RandomSpans(rng, n));
      pred.push_back(rng.Index(3) == 0 ? gold.back() : RandomSpans(rng, n));
    }
    REQUIRE(ScoreChunks(gold, pred) == BruteForce(gold, pred));
  }
}

TEST_CASE("swapping gold and prediction swaps precision and recall") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    SpanLists gold{RandomSpans(rng, 8), RandomSpans(rng, 6)};
    SpanLists pred{RandomSpans(rng, 8), RandomSpans(rng, 6)};
    ChunkMetrics a = ScoreChunks(gold, pred), b = ScoreChunks(pred, gold);
    CHECK(a.precision() == b.recall());
    CHECK(a.recall() == b.precision());
    CHECK(a.f1() == doctest::Approx(b.f1()).epsilon(1e-15));
  }
}

TEST_CASE("adding predictions moves recall and precision monotonically") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    SpanLists gold{RandomSpans(rng, 10)};
    if (gold[0].empty()) continue;
    SpanLists pred{{}};
    for (const Span& g : gold[0]) {
      if (rng.Index(2) == 0) pred[0].push_back(g);
    }
    ChunkMetrics before = ScoreChunks(gold, pred);
    SpanLists more_correct = pred;
    for (const Span& g : gold[0]) {
      if (std::find(pred[0].begin(), pred[0].end(), g) == pred[0].end()) {
        more_correct[0].push_back(g);
        break;
      }
    }
    CHECK(ScoreChunks(gold, more_correct).recall() >= before.recall());
    SpanLists more_wrong = pred;
    more_wrong[0].push_back(A(20, 21));
    CHECK(ScoreChunks(gold, more_wrong).precision() <= before.precision());
  }
}

std::vector<Sentence> Corpus() {
  SyntheticConfig c = SyntheticConfig::Default();
  c.n_sentences = 10;
  c.dim = 4;
  return GenerateSynthetic(c).sentences;
}

TEST_CASE("scoring the gold set against itself gives 100 everywhere") {
  std::vector<Sentence> gold = Corpus();
  CorpusScores s = ScoreAnnotated(gold, gold);
  CHECK(s.aspect.f1() == 100.0);
  CHECK(s.opinion.f1() == 100.0);
  CHECK(s.overall.precision() == 100.0);
  const std::string tsv = MetricsTsv(s);
  CHECK(tsv.find("aspect\t") != std::string::npos);
  CHECK(tsv.find("\t100.00\t100.00\t100.00\n") != std::string::npos);

  std::vector<Sentence> shuffled = gold;
  std::swap(shuffled[0], shuffled[1]);
  CHECK_THROWS_AS(ScoreAnnotated(gold, shuffled), std::invalid_argument);
}

TEST_CASE("score_corpus equals score_chunks over the predictions") {
  SyntheticConfig c = SyntheticConfig::Default();
  c.n_sentences = 10;
  c.dim = 5;
  SyntheticCorpus corpus = GenerateSynthetic(c);
  CmlaParams p = CmlaParams::Init(ModelConfig{5, 3, 2}, 4);
  CorpusScores s = ScoreCorpus(p, corpus.sentences, corpus.embeddings);
  SpanLists ga, gp, pa, pp;
  for (std::size_t i = 0; i < corpus.sentences.size(); ++i) {
    ga.push_back(corpus.sentences[i].aspect_spans);
    gp.push_back(corpus.sentences[i].opinion_spans);
    pa.push_back(s.predictions[i].aspects);
    pp.push_back(s.predictions[i].opinions);
  }
  CHECK(s.aspect == BruteForce(ga, pa));
  CHECK(s.opinion == BruteForce(gp, pp));
  ChunkMetrics pooled = s.aspect;
  pooled += s.opinion;
  CHECK(s.overall == pooled);
}

TEST_CASE("a model that predicts only O has zero aspect recall") {
  CmlaParams p = CmlaParams::Zeros(ModelConfig{4, 2, 2});
  p.gru_att_a.b_h = Tensor::Filled({2}, 1.0);
  p.gru_att_a.b_z = Tensor::Filled({2}, 5.0);
  p.v_a = Tensor::Matrix(3, 2, {-1, -1, -1, -1, 1, 1});
  SyntheticConfig c = SyntheticConfig::Default();
  c.n_sentences = 5;
  c.dim = 4;
  SyntheticCorpus corpus = GenerateSynthetic(c);
  CorpusScores s = ScoreCorpus(p, corpus.sentences, corpus.embeddings);
  CHECK(s.aspect.tp == 0);
  CHECK(s.aspect.fp == 0);
  CHECK(s.aspect.recall() == 0.0);
  CHECK(s.aspect.precision() == 0.0);
}

TEST_CASE("metrics formats") {
  CorpusScores s;
  s.aspect = ChunkMetrics{2, 1, 1};
  s.opinion = ChunkMetrics{0, 0, 3};
  s.overall = ChunkMetrics{2, 1, 4};
  CHECK(MetricsTsv(s) ==
        "head\ttp\tfp\tfn\tprecision\trecall\tf1\n"
        "aspect\t2\t1\t1\t66.67\t66.67\t66.67\n"
        "opinion\t0\t0\t3\t0.00\t0.00\t0.00\n"
        "overall\t2\t1\t4\t66.67\t33.33\t44.44\n");
  CHECK(MetricsTable(s, "dutch") ==
        "                     aspect                            opinion\n"
        "          precision    recall        f1   precision    recall        f1\n"
        "dutch         66.67     66.67     66.67        0.00      0.00      0.00\n");
}

Sentence Tokenized(const std::string& text) {
  Sentence s;
  s.raw_text = text;
  s.tokens = Tokenize(text);
  return s;
}

TEST_CASE("attention report rows") {
  const CmlaParams p = CmlaParams::Init(ModelConfig{4, 2, 2}, 5);
  EmbeddingTable table = RandomEmbeddings({"zeer", "goede", "ligging", "en", "prima", "terras"},
                                          4, 1.0, 3);

  Sentence one = Tokenized("terras");
  std::vector<AttentionRow> rows = AttentionReport(one, Predict(one, table, p));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].attention_a == 1.0);
  CHECK(rows[0].attention_p == 1.0);

  Sentence six = Tokenized("zeer goede ligging en prima terras");
  six.aspect_spans = {A(2, 3), A(5, 6)};
  rows = AttentionReport(six, Predict(six, table, p));
  REQUIRE(rows.size() == 6);
  double sa = 0.0, sp = 0.0;
  for (const AttentionRow& r : rows) {
    sa += r.attention_a;
    sp += r.attention_p;
  }
  CHECK(std::abs(sa - 1.0) < 1e-12);
  CHECK(std::abs(sp - 1.0) < 1e-12);
  CHECK(rows[2].gold_a == Tag::kB);
  CHECK(rows[2].token == "ligging");
  const std::string tsv = AttentionTsv(rows);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 7);
  CHECK(tsv.rfind("index\ttoken\tattention_aspect", 0) == 0);
}

TEST_CASE("attention report has one row per token on fuzzed sentences") {
  Rng rng(6);
  const std::vector<std::string> vocab{"a", "b", "c", "d", ",", "e"};
  const CmlaParams p = CmlaParams::Init(ModelConfig{3, 2, 2}, 6);
  EmbeddingTable table = RandomEmbeddings(vocab, 3, 1.0, 6);
  for (int trial = 0; trial < 100; ++trial) {
    std::string text;
    const std::size_t n = 1 + rng.Index(12);
    for (std::size_t i = 0; i < n; ++i) text += vocab[rng.Index(vocab.size())] + " ";
    Sentence s = Tokenized(text);
    CHECK(AttentionReport(s, Predict(s, table, p)).size() == s.tokens.size());
  }
}

TEST_CASE("attention report rejects unnormalized or mismatched scores") {
  const CmlaParams p = CmlaParams::Init(ModelConfig{3, 2, 2}, 7);
  EmbeddingTable table(3);
  Sentence s = Tokenized("x y");
  Prediction pred = Predict(s, table, p);
  Prediction skewed = pred;
  skewed.scores[0].attention_a += 1e-6;
  CHECK_THROWS_AS(AttentionReport(s, skewed), std::invalid_argument);
  CHECK_THROWS_AS(AttentionReport(Tokenized("x y z"), pred), std::invalid_argument);
}

}  // namespace
}  // namespace cmla
