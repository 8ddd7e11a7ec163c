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

#include "cmla/embeddings.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cmla/sentence.h"
#include "cmla/text.h"

namespace cmla {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

template <typename T>
bool ParseNumber(std::string_view field, T& out) {
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

std::vector<double> BucketVector(std::size_t bucket, std::size_t dim) {
  Rng rng(0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(bucket));
  std::vector<double> v(dim);
  for (double& x : v) x = rng.Uniform(-0.25, 0.25);
  return v;
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::size_t dim, OovPolicy policy) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("embedding dim must be positive");
  set_oov_policy(policy);
}

void EmbeddingTable::set_oov_policy(OovPolicy policy) {
  if (policy.kind == OovPolicy::Kind::kHashBucket && policy.buckets == 0) {
    throw std::invalid_argument("hash_bucket policy needs at least one bucket");
  }
  policy_ = policy;
}

bool EmbeddingTable::Set(std::string_view word, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw ShapeError("embedding for \"" + std::string(word) + "\" has " +
                     std::to_string(vector.size()) + " values, expected " +
                     std::to_string(dim_));
  }
  auto it = index_.find(std::string(word));
  if (it != index_.end()) {
    std::copy(vector.begin(), vector.end(),
              values_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
    return true;
  }
  index_.emplace(std::string(word), words_.size());
  words_.emplace_back(word);
  values_.insert(values_.end(), vector.begin(), vector.end());
  return false;
}

bool EmbeddingTable::Contains(std::string_view word) const {
  return !Find(word).empty();
}

std::span<const double> EmbeddingTable::vector_at(std::size_t index) const {
  return std::span<const double>(values_).subspan(index * dim_, dim_);
}

std::span<const double> EmbeddingTable::Find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) it = index_.find(Lowercase(word));
  if (it == index_.end()) return {};
  return vector_at(it->second);
}

std::vector<double> EmbeddingTable::Lookup(std::string_view word) const {
  auto found = Find(word);
  if (!found.empty()) return {found.begin(), found.end()};
  if (policy_.kind == OovPolicy::Kind::kHashBucket) {
    return BucketVector(StableHash(Lowercase(word)) % policy_.buckets, dim_);
  }
  return std::vector<double>(dim_, 0.0);
}

Tensor EmbeddingTable::Embed(std::span<const std::string> words) const {
  if (words.empty()) throw ShapeError("cannot embed an empty sentence");
  std::vector<double> data;
  data.reserve(words.size() * dim_);
  for (const std::string& w : words) {
    auto v = Lookup(w);
    data.insert(data.end(), v.begin(), v.end());
  }
  return Tensor({words.size(), dim_}, std::move(data));
}

LoadedEmbeddings LoadEmbeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return ReadEmbeddings(in, path.string());
}

LoadedEmbeddings ReadEmbeddings(std::istream& in, std::string_view name) {
  const std::string where(name);
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> DataError {
    return DataError(where + ":" + std::to_string(line_no) + ": " + what);
  };

  std::size_t vocab = 0, dim = 0;
  ++line_no;
  if (!std::getline(in, line)) throw fail("missing \"vocab_size dim\" header");
  {
    auto fields = SplitFields(line);
    if (fields.size() != 2 || !ParseNumber(fields[0], vocab) ||
        !ParseNumber(fields[1], dim) || dim == 0) {
      throw fail("header must be \"vocab_size dim\" with positive dim");
    }
  }

  LoadedEmbeddings result{EmbeddingTable(dim), 0};
  std::vector<double> values(dim);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = SplitFields(line);
    if (fields.empty()) continue;
    if (fields.size() != dim + 1) {
      throw fail("expected a word and " + std::to_string(dim) + " values, got " +
                 std::to_string(fields.size() - 1) + " values");
    }
    for (std::size_t k = 0; k < dim; ++k) {
      if (!ParseNumber(fields[k + 1], values[k]) || !std::isfinite(values[k])) {
        throw fail("non-numeric value \"" + std::string(fields[k + 1]) + "\"");
      }
    }
    if (result.table.Set(fields[0], values)) ++result.duplicates;
    ++rows;
  }
  if (rows != vocab) {
    throw DataError(where + ": header declares " + std::to_string(vocab) +
                    " words but " + std::to_string(rows) + " lines follow");
  }
  return result;
}

void WriteEmbeddings(std::ostream& out, const EmbeddingTable& table) {
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[32];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words()[i];
    for (double v : table.vector_at(i)) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
}

double Cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("cosine: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<Neighbor> NearestNeighbors(const EmbeddingTable& table,
                                       std::span<const double> query,
                                       std::size_t k) {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    scored.emplace_back(Cosine(query, table.vector_at(i)), i);
  }
  const std::size_t top = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(top),
                    scored.end(), [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<Neighbor> out;
  for (std::size_t i = 0; i < top; ++i) {
    out.push_back({table.words()[scored[i].second], scored[i].first});
  }
  return out;
}

std::uint64_t StableHash(std::string_view text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace cmla
