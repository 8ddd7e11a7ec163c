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

#ifndef CMLA_EMBEDDINGS_H_
#define CMLA_EMBEDDINGS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cmla/tensor.h"

namespace cmla {

// How lookups of unknown words resolve.
struct OovPolicy {
  enum class Kind { kZeroVector, kHashBucket };
  Kind kind = Kind::kZeroVector;
  // Bucket count for kHashBucket. Bucket vectors are fixed pseudo-random
  // draws from U[-0.25, 0.25].
  std::size_t buckets = 0;

  static OovPolicy Zero() { return {}; }
  static OovPolicy HashBucket(std::size_t n) { return {Kind::kHashBucket, n}; }
};

// Word to dense vector map of a fixed dimension. Lookup is total.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim, OovPolicy policy = {});

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const OovPolicy& oov_policy() const { return policy_; }
  void set_oov_policy(OovPolicy policy);

  // Inserts or replaces. Returns true when the word was already present.
  bool Set(std::string_view word, std::span<const double> vector);
  bool Contains(std::string_view word) const;
  // Exact match, then lowercase match; an empty span if neither.
  std::span<const double> Find(std::string_view word) const;
  std::vector<double> Lookup(std::string_view word) const;
  // Row i is Lookup(words[i]).
  Tensor Embed(std::span<const std::string> words) const;
  std::span<const double> vector_at(std::size_t index) const;

 private:
  std::size_t dim_;
  OovPolicy policy_;
  std::vector<std::string> words_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LoadedEmbeddings {
  EmbeddingTable table;
  std::size_t duplicates = 0;
};

// Text format: a "vocab_size dim" header, then vocab_size lines each holding
// a word and dim space-separated reals. Errors name the offending line.
LoadedEmbeddings LoadEmbeddings(const std::filesystem::path& path);
LoadedEmbeddings ReadEmbeddings(std::istream& in, std::string_view name);
void WriteEmbeddings(std::ostream& out, const EmbeddingTable& table);

double Cosine(std::span<const double> a, std::span<const double> b);

struct Neighbor {
  std::string word;
  double cosine = 0.0;
};

// Top k table entries by cosine similarity to query, ties by table order.
std::vector<Neighbor> NearestNeighbors(const EmbeddingTable& table,
                                       std::span<const double> query,
                                       std::size_t k);

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t StableHash(std::string_view text);

}  // namespace cmla

#endif  // CMLA_EMBEDDINGS_H_
