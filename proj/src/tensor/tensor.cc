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

#include "cmla/tensor.h"

#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <sstream>

namespace cmla {
namespace {

std::size_t ShapeProduct(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

void CheckDims(const Shape& shape) {
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeError("zero dimension in shape " + ShapeToString(shape));
  }
}

}  // namespace

std::string ShapeToString(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << ',';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  CheckDims(shape_);
  data_.assign(ShapeProduct(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  CheckDims(shape_);
  if (data_.size() != ShapeProduct(shape_)) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + ShapeToString(shape_));
  }
}

Tensor Tensor::Vector(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(Shape{n}, std::move(values));
}

Tensor Tensor::Matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor(Shape{rows, cols}, std::move(values));
}

Tensor Tensor::Filled(Shape shape, double value) {
  Tensor t(std::move(shape));
  std::fill(t.data_.begin(), t.data_.end(), value);
  return t;
}

Tensor Tensor::Identity(std::size_t n) {
  Tensor t(Shape{n, n});
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw ShapeError("item() on tensor of shape " + ShapeToString(shape_));
  }
  return data_[0];
}

bool Tensor::AllFinite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

bool operator==(const Tensor& a, const Tensor& b) {
  if (a.shape_ != b.shape_) return false;
  return a.data_.empty() ||
         std::memcmp(a.data_.data(), b.data_.data(),
                     a.data_.size() * sizeof(double)) == 0;
}

double Rng::Uniform(double lo, double hi) {
  const double unit =
      static_cast<double>(engine_() >> 11) * 0x1.0p-53;  // [0, 1)
  return lo + (hi - lo) * unit;
}

std::size_t Rng::Index(std::size_t n) {
  // Rejection sampling keeps the draw unbiased and library-independent.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

Tensor InitUniform(const Shape& shape, double lo, double hi, Rng& rng) {
  if (!(lo < hi)) throw std::invalid_argument("InitUniform requires lo < hi");
  if (shape.empty()) throw ShapeError("InitUniform requires a nonempty shape");
  Tensor t(shape);
  for (double& v : t.data()) v = rng.Uniform(lo, hi);
  return t;
}

Tensor InitUniform(const Shape& shape, double lo, double hi,
                   std::uint64_t seed) {
  Rng rng(seed);
  return InitUniform(shape, lo, hi, rng);
}

}  // namespace cmla
