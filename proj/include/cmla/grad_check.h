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

#ifndef CMLA_GRAD_CHECK_H_
#define CMLA_GRAD_CHECK_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cmla/graph.h"
#include "cmla/tensor.h"

namespace cmla {

// Builds a scalar from parameter leaves already placed in the graph.
using ScalarFunction = std::function<Var(Graph&, std::span<const Var>)>;

struct GradCheckOptions {
  double eps = 1e-5;
  // 0 checks every coordinate; otherwise that many are sampled.
  std::size_t max_coordinates = 0;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::size_t worst_param = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

// Compares backward() against central differences. The relative error of a
// coordinate is |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
GradCheckResult GradCheck(const ScalarFunction& f,
                          std::span<const Tensor> params,
                          const GradCheckOptions& options = {});

}  // namespace cmla

#endif  // CMLA_GRAD_CHECK_H_
