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

#include "cmla/grad_check.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace cmla {
namespace {

double Evaluate(const ScalarFunction& f, std::span<const Tensor> params) {
  Graph g;
  std::vector<Var> leaves;
  leaves.reserve(params.size());
  for (const Tensor& p : params) leaves.push_back(g.Leaf(p, false));
  return g.value(f(g, leaves)).item();
}

}  // namespace

GradCheckResult GradCheck(const ScalarFunction& f,
                          std::span<const Tensor> params,
                          const GradCheckOptions& options) {
  if (!(options.eps > 0)) throw std::invalid_argument("grad check eps must be > 0");

  std::vector<Tensor> analytic;
  {
    Graph g;
    std::vector<Var> leaves;
    for (const Tensor& p : params) leaves.push_back(g.Leaf(p, true));
    const Gradients grads = g.Backward(f(g, leaves));
    for (Var v : leaves) analytic.push_back(grads[v]);
  }

  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p].size(); ++i) coords.emplace_back(p, i);
  }
  if (options.max_coordinates > 0 && coords.size() > options.max_coordinates) {
    Rng rng(options.seed);
    // Partial Fisher-Yates: the first max_coordinates entries are a sample.
    for (std::size_t i = 0; i < options.max_coordinates; ++i) {
      std::swap(coords[i], coords[i + rng.Index(coords.size() - i)]);
    }
    coords.resize(options.max_coordinates);
  }

  std::vector<Tensor> work(params.begin(), params.end());
  GradCheckResult result;
  for (auto [p, i] : coords) {
    const double original = work[p][i];
    work[p][i] = original + options.eps;
    const double plus = Evaluate(f, work);
    work[p][i] = original - options.eps;
    const double minus = Evaluate(f, work);
    work[p][i] = original;

    const double numeric = (plus - minus) / (2.0 * options.eps);
    const double exact = analytic[p][i];
    const double denom = std::max({std::abs(exact), std::abs(numeric), 1e-6});
    const double err = std::abs(exact - numeric) / denom;
    ++result.coordinates_checked;
    if (err > result.max_relative_error || result.coordinates_checked == 1) {
      result.max_relative_error = err;
      result.worst_param = p;
      result.worst_index = i;
      result.worst_analytic = exact;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace cmla
