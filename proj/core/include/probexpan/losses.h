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

#ifndef PROBEXPAN_LOSSES_H_
#define PROBEXPAN_LOSSES_H_

#include <span>
#include <vector>

#include "probexpan/common.h"

namespace probexpan {

// Floor applied to probabilities before taking logs.
inline constexpr double kLogFloor = 1e-12;

struct SmoothingConfig {
  double eta = 0.1;

  void Validate() const;
};

// Label-smoothed prediction loss, averaged over the batch:
//   -(1/N) sum_i sum_j [j == y_i ? 1 - eta : eta] * log max(p_i[j], 1e-12)
// Note the off-target weight is eta per entry, not eta / (V_e - 1).
double LabelSmoothingLoss(std::span<const Distribution> predictions,
                          std::span<const EntityId> labels, double eta);

struct ContrastiveConfig {
  double class_prior = 0.05;    // tau+
  double concentration = 1.0;   // beta
  double temperature = 0.5;     // t
  int thr_pos = 20;
  int lower_neg = 40;
  int upper_neg = 80;

  void Validate() const;
};

struct ContrastiveResult {
  double loss = 0.0;
  // Clamped negative term S-_i for every row.
  std::vector<double> negative_terms;
  // d loss / d z, same shape as the input; empty unless requested.
  Matrix grad;
};

// Hard-negative debiased contrastive loss over 2N unit vectors (one per row).
// Rows 2m and 2m+1 form pair m. Requires 2N >= 4.
//
//   S+_i  = exp(z_i . z_j(i) / t)
//   S~_i  = (2N-2) sum_k exp((1+b) z_i.z_k / t) / sum_k exp(b z_i.z_k / t)
//   S-_i  = max((S~_i - (2N-2) tau+ S+_i) / (1 - tau+), exp(-1/t))
//   loss  = -sum_i log(S+_i / (S+_i + S-_i))
//
// where k ranges over all rows other than i and j(i).
ContrastiveResult ContrastiveLoss(const Matrix& z, const ContrastiveConfig& cfg,
                                  bool want_grad = false);

}  // namespace probexpan

#endif  // PROBEXPAN_LOSSES_H_
