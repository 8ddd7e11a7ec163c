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

#ifndef CMLA_TENSOR_H_
#define CMLA_TENSOR_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cmla {

// Dimension mismatch or an invalid shape.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite value produced during training or evaluation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Shape = std::vector<std::size_t>;

std::string ShapeToString(const Shape& shape);

// Dense row-major array of doubles. Rank 0 is a scalar, rank 1 a vector and
// rank 2 a matrix; higher ranks are stored but only reshaped by the graph.
class Tensor {
 public:
  Tensor() : data_(1, 0.0) {}
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Scalar(double value) { return Tensor(Shape{}, {value}); }
  static Tensor Vector(std::vector<double> values);
  static Tensor Matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values);
  static Tensor Filled(Shape shape, double value);
  static Tensor Identity(std::size_t n);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
  double at(std::size_t r, std::size_t c) const {
    return data_[r * shape_[1] + c];
  }

  double item() const;
  bool AllFinite() const;

  // Bitwise equality of shape and contents.
  friend bool operator==(const Tensor& a, const Tensor& b);

 private:
  Shape shape_;
  std::vector<double> data_;
};

// Seedable generator owned by the caller. The uniform mapping uses the top 53
// bits of each draw so sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform(double lo, double hi);
  std::size_t Index(std::size_t n);
  std::uint64_t Next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Entries drawn i.i.d. from U[lo, hi]. Throws on lo >= hi or a zero dim.
Tensor InitUniform(const Shape& shape, double lo, double hi, Rng& rng);
Tensor InitUniform(const Shape& shape, double lo, double hi,
                   std::uint64_t seed);

}  // namespace cmla

#endif  // CMLA_TENSOR_H_
