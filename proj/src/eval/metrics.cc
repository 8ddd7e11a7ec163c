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

#include "cmla/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace cmla {
namespace {

double Percent(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

std::string Fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

ChunkMetrics ScoreSentence(std::vector<Span> gold, std::vector<Span> predicted) {
  std::sort(gold.begin(), gold.end());
  std::sort(predicted.begin(), predicted.end());
  ChunkMetrics m;
  auto g = gold.begin();
  auto p = predicted.begin();
  while (g != gold.end() && p != predicted.end()) {
    if (*g == *p) {
      ++m.tp;
      ++g;
      ++p;
    } else if (*g < *p) {
      ++m.fn;
      ++g;
    } else {
      ++m.fp;
      ++p;
    }
  }
  m.fn += static_cast<std::size_t>(gold.end() - g);
  m.fp += static_cast<std::size_t>(predicted.end() - p);
  return m;
}

void AddRow(std::ostringstream& out, std::string_view head, const ChunkMetrics& m) {
  out << head << '\t' << m.tp << '\t' << m.fp << '\t' << m.fn << '\t'
      << Fixed(m.precision(), 2) << '\t' << Fixed(m.recall(), 2) << '\t'
      << Fixed(m.f1(), 2) << '\n';
}

void CheckNormalized(std::span<const TokenScores> scores) {
  double sum_a = 0.0, sum_p = 0.0;
  for (const TokenScores& s : scores) {
    sum_a += s.attention_a;
    sum_p += s.attention_p;
  }
  if (std::abs(sum_a - 1.0) > 1e-9 || std::abs(sum_p - 1.0) > 1e-9) {
    throw std::invalid_argument("attention scores are not normalized (sums " +
                                Fixed(sum_a, 12) + ", " + Fixed(sum_p, 12) + ")");
  }
}

}  // namespace

double ChunkMetrics::precision() const { return Percent(tp, tp + fp); }
double ChunkMetrics::recall() const { return Percent(tp, tp + fn); }

double ChunkMetrics::f1() const {
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

ChunkMetrics& ChunkMetrics::operator+=(const ChunkMetrics& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  return *this;
}

ChunkMetrics ScoreChunks(std::span<const std::vector<Span>> gold,
                         std::span<const std::vector<Span>> predicted) {
  if (gold.size() != predicted.size()) {
    throw std::invalid_argument("score_chunks: " + std::to_string(gold.size()) +
                                " gold sentences but " +
                                std::to_string(predicted.size()) + " predicted");
  }
  ChunkMetrics total;
  for (std::size_t i = 0; i < gold.size(); ++i) total += ScoreSentence(gold[i], predicted[i]);
  return total;
}

CorpusScores ScoreCorpus(const CmlaParams& params,
                         std::span<const Sentence> sentences,
                         const EmbeddingTable& embeddings) {
  CorpusScores scores;
  std::vector<std::vector<Span>> gold_a, gold_p, pred_a, pred_p;
  for (const Sentence& s : sentences) {
    Prediction pred = Predict(s, embeddings, params);
    gold_a.push_back(s.aspect_spans);
    gold_p.push_back(s.opinion_spans);
    pred_a.push_back(pred.aspects);
    pred_p.push_back(pred.opinions);
    scores.predictions.push_back(std::move(pred));
  }
  scores.aspect = ScoreChunks(gold_a, pred_a);
  scores.opinion = ScoreChunks(gold_p, pred_p);
  scores.overall = scores.aspect;
  scores.overall += scores.opinion;
  return scores;
}

CorpusScores ScoreAnnotated(std::span<const Sentence> gold,
                            std::span<const Sentence> predicted) {
  if (gold.size() != predicted.size()) {
    throw std::invalid_argument("gold has " + std::to_string(gold.size()) +
                                " sentences, predictions " +
                                std::to_string(predicted.size()));
  }
  CorpusScores scores;
  std::vector<std::vector<Span>> gold_a, gold_p, pred_a, pred_p;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].id != predicted[i].id) {
      throw std::invalid_argument("sentence " + std::to_string(i) + " is \"" +
                                  gold[i].id + "\" in gold but \"" +
                                  predicted[i].id + "\" in predictions");
    }
    gold_a.push_back(gold[i].aspect_spans);
    gold_p.push_back(gold[i].opinion_spans);
    pred_a.push_back(predicted[i].aspect_spans);
    pred_p.push_back(predicted[i].opinion_spans);
  }
  scores.aspect = ScoreChunks(gold_a, pred_a);
  scores.opinion = ScoreChunks(gold_p, pred_p);
  scores.overall = scores.aspect;
  scores.overall += scores.opinion;
  return scores;
}

std::string MetricsTsv(const CorpusScores& scores) {
  std::ostringstream out;
  out << "head\ttp\tfp\tfn\tprecision\trecall\tf1\n";
  AddRow(out, "aspect", scores.aspect);
  AddRow(out, "opinion", scores.opinion);
  AddRow(out, "overall", scores.overall);
  return out.str();
}

std::string MetricsTable(const CorpusScores& scores, std::string_view dataset) {
  const std::size_t width = std::max<std::size_t>(dataset.size(), 7);
  auto cell = [](double v) {
    std::string s = Fixed(v, 2);
    return std::string(10 - std::min<std::size_t>(s.size(), 10), ' ') + s;
  };
  std::ostringstream out;
  out << std::string(width, ' ') << "  " << "            aspect              "
      << "  " << "            opinion\n";
  out << std::string(width, ' ') << "  "
      << " precision    recall        f1   precision    recall        f1\n";
  out << dataset << std::string(width - dataset.size(), ' ') << "  "
      << cell(scores.aspect.precision()) << cell(scores.aspect.recall())
      << cell(scores.aspect.f1()) << "  " << cell(scores.opinion.precision())
      << cell(scores.opinion.recall()) << cell(scores.opinion.f1()) << '\n';
  return out.str();
}

std::vector<AttentionRow> AttentionReport(const Sentence& sentence,
                                          const Prediction& prediction) {
  const std::size_t n = sentence.tokens.size();
  if (prediction.scores.size() != n || prediction.labels_a.size() != n ||
      prediction.labels_p.size() != n) {
    throw std::invalid_argument("prediction covers " +
                                std::to_string(prediction.scores.size()) +
                                " tokens, sentence has " + std::to_string(n));
  }
  if (n == 0) return {};
  CheckNormalized(prediction.scores);
  const LabelSeq gold_a = sentence.AspectLabels();
  const LabelSeq gold_p = sentence.OpinionLabels();
  std::vector<AttentionRow> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back(AttentionRow{i, sentence.tokens[i].text,
                                prediction.scores[i].attention_a,
                                prediction.scores[i].attention_p, gold_a.labels[i],
                                gold_p.labels[i], prediction.labels_a.labels[i],
                                prediction.labels_p.labels[i]});
  }
  return rows;
}

std::string AttentionTsv(std::span<const AttentionRow> rows) {
  std::ostringstream out;
  out << "index\ttoken\tattention_aspect\tattention_opinion\tgold_aspect\t"
         "gold_opinion\tpred_aspect\tpred_opinion\n";
  for (const AttentionRow& r : rows) {
    out << r.index << '\t' << r.token << '\t' << Fixed(r.attention_a, 12) << '\t'
        << Fixed(r.attention_p, 12) << '\t' << TagName(r.gold_a) << '\t'
        << TagName(r.gold_p) << '\t' << TagName(r.pred_a) << '\t'
        << TagName(r.pred_p) << '\n';
  }
  return out.str();
}

}  // namespace cmla
