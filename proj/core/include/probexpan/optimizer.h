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

#ifndef PROBEXPAN_OPTIMIZER_H_
#define PROBEXPAN_OPTIMIZER_H_

#include "probexpan/model.h"

namespace probexpan {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-6;
  double weight_decay = 1e-2;
};

// Adam with decoupled weight decay. Each step first scales parameters by
// (1 - lr * weight_decay) and then applies the bias-corrected moment update.
class AdamW {
 public:
  AdamW(const ModelDims& dims, const AdamWConfig& config);

  void Step(ModelParams& params, const ModelParams& grad, double lr);

  int steps() const { return steps_; }
  const AdamWConfig& config() const { return config_; }

 private:
  AdamWConfig config_;
  ModelParams first_moment_;
  ModelParams second_moment_;
  int steps_ = 0;
};

}  // namespace probexpan

#endif  // PROBEXPAN_OPTIMIZER_H_
