// Copyright 2026 The ProbExpan Authors.
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

#include "probexpan/optimizer.h"

#include <cmath>

namespace probexpan {

AdamW::AdamW(const ModelDims& dims, const AdamWConfig& config)
    : config_(config),
      first_moment_(ModelParams::Zeros(dims)),
      second_moment_(ModelParams::Zeros(dims)) {}

void AdamW::Step(ModelParams& params, const ModelParams& grad, double lr) {
  if (!(params.dims == first_moment_.dims) || !(grad.dims == params.dims)) {
    throw Error("optimizer step: shape mismatch");
  }
  ++steps_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double correction1 = 1.0 - std::pow(b1, steps_);
  const double correction2 = 1.0 - std::pow(b2, steps_);
  const double decay = 1.0 - lr * config_.weight_decay;

  auto p = params.Tensors();
  auto g = grad.Tensors();
  auto m = first_moment_.Tensors();
  auto v = second_moment_.Tensors();
  for (int t = 0; t < ModelParams::kNumTensors; ++t) {
    for (std::size_t i = 0; i < p[t].size(); ++i) {
      m[t][i] = b1 * m[t][i] + (1.0 - b1) * g[t][i];
      v[t][i] = b2 * v[t][i] + (1.0 - b2) * g[t][i] * g[t][i];
      const double m_hat = m[t][i] / correction1;
      const double v_hat = v[t][i] / correction2;
      p[t][i] = p[t][i] * decay -
                lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

}  // namespace probexpan
