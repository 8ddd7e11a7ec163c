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

#ifndef CMLA_METRICS_H_
#define CMLA_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cmla/bio.h"
#include "cmla/embeddings.h"
#include "cmla/model.h"
#include "cmla/predict.h"
#include "cmla/sentence.h"

namespace cmla {

// Exact-match chunk counts. Percentages are 0 when their denominator is 0.
struct ChunkMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;

  ChunkMetrics& operator+=(const ChunkMetrics& other);
  friend bool operator==(const ChunkMetrics&, const ChunkMetrics&) = default;
};

// A predicted span is a true positive iff gold holds an identical
// (start, end, kind) span in the same sentence. Throws std::invalid_argument
// when the two lists cover different numbers of sentences.
ChunkMetrics ScoreChunks(std::span<const std::vector<Span>> gold,
                         std::span<const std::vector<Span>> predicted);

struct CorpusScores {
  ChunkMetrics aspect;
  ChunkMetrics opinion;
  // Aspect and opinion counts pooled.
  ChunkMetrics overall;
  std::vector<Prediction> predictions;
};

// Runs the model on every sentence and scores each head against the gold
// spans stored in the sentences.
CorpusScores ScoreCorpus(const CmlaParams& params,
                         std::span<const Sentence> sentences,
                         const EmbeddingTable& embeddings);

// Scores an already-annotated prediction set. Sentences are paired by
// position and must carry the same ids.
CorpusScores ScoreAnnotated(std::span<const Sentence> gold,
                            std::span<const Sentence> predicted);

// Tab-separated: head, tp, fp, fn, precision, recall, f1 (two decimals).
std::string MetricsTsv(const CorpusScores& scores);
// Aspect and opinion precision/recall/F1 side by side, one dataset per row.
std::string MetricsTable(const CorpusScores& scores, std::string_view dataset);

struct AttentionRow {
  std::size_t index = 0;
  std::string token;
  double attention_a = 0.0;
  double attention_p = 0.0;
  Tag gold_a = Tag::kO;
  Tag gold_p = Tag::kO;
  Tag pred_a = Tag::kO;
  Tag pred_p = Tag::kO;
};

// One row per token in order. Throws std::invalid_argument if a score column
// does not sum to 1 within 1e-9 or the prediction covers another length.
std::vector<AttentionRow> AttentionReport(const Sentence& sentence,
                                          const Prediction& prediction);
std::string AttentionTsv(std::span<const AttentionRow> rows);

}  // namespace cmla

#endif  // CMLA_METRICS_H_
