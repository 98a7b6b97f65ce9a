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

#include "probexpan/losses.h"

#include <algorithm>
#include <cmath>

namespace probexpan {

void SmoothingConfig::Validate() const {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw Error("smoothing factor must be in [0, 1)");
  }
}

void ContrastiveConfig::Validate() const {
  if (!(class_prior >= 0.0 && class_prior < 1.0)) {
    throw Error("class prior tau+ must be in [0, 1)");
  }
  if (!(concentration >= 0.0)) throw Error("concentration beta must be >= 0");
  if (!(temperature > 0.0)) throw Error("temperature must be > 0");
  if (thr_pos < 0) throw Error("thr_pos must be >= 0");
  if (lower_neg >= upper_neg) throw Error("lower_neg must be < upper_neg");
}

double LabelSmoothingLoss(std::span<const Distribution> predictions,
                          std::span<const EntityId> labels, double eta) {
  if (predictions.empty() || predictions.size() != labels.size()) {
    throw Error("label smoothing loss: empty or mismatched batch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Distribution& p = predictions[i];
    const EntityId y = labels[i];
    if (y < 0 || y >= static_cast<EntityId>(p.size())) {
      throw Error("label smoothing loss: label out of range");
    }
    double row = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double w = static_cast<EntityId>(j) == y ? 1.0 - eta : eta;
      row += w * std::log(std::max(p[j], kLogFloor));
    }
    total -= row;
  }
  return total / static_cast<double>(predictions.size());
}

ContrastiveResult ContrastiveLoss(const Matrix& z, const ContrastiveConfig& cfg,
                                  bool want_grad) {
  const int n2 = static_cast<int>(z.rows());
  if (n2 < 4 || n2 % 2 != 0) {
    throw Error("contrastive loss needs an even batch of at least 4 vectors");
  }
  if (!(cfg.class_prior < 1.0)) throw Error("class prior tau+ must be < 1");

  const double t = cfg.temperature;
  const double beta = cfg.concentration;
  const double tau = cfg.class_prior;
  const double others = n2 - 2;
  const double floor = std::exp(-1.0 / t);

  const Matrix sim = (z * z.transpose()) / t;
  Matrix dsim;
  if (want_grad) dsim = Matrix::Zero(n2, n2);

  ContrastiveResult result;
  result.negative_terms.resize(n2);
  std::vector<double> tilted(n2), weights(n2);
  for (int i = 0; i < n2; ++i) {
    const int j = i ^ 1;
    const double pos = std::exp(sim(i, j));
    double num = 0.0, den = 0.0;
    for (int k = 0; k < n2; ++k) {
      if (k == i || k == j) continue;
      tilted[k] = std::exp((1.0 + beta) * sim(i, k));
      weights[k] = std::exp(beta * sim(i, k));
      num += tilted[k];
      den += weights[k];
    }
    const double reweighted = others * num / den;
    const double raw = (reweighted - others * tau * pos) / (1.0 - tau);
    const bool clamped = raw < floor;
    const double neg = clamped ? floor : raw;
    result.negative_terms[i] = neg;
    result.loss += std::log(pos + neg) - sim(i, j);

    if (!want_grad) continue;
    const double inv = 1.0 / (pos + neg);
    double dpos = inv;
    if (!clamped) dpos -= inv * others * tau / (1.0 - tau);
    dsim(i, j) += dpos * pos - 1.0;
    if (clamped) continue;
    const double dreweighted = inv / (1.0 - tau);
    for (int k = 0; k < n2; ++k) {
      if (k == i || k == j) continue;
      const double d = others *
                       ((1.0 + beta) * tilted[k] * den - num * beta * weights[k]) /
                       (den * den);
      dsim(i, k) += dreweighted * d;
    }
  }
  if (want_grad) {
    result.grad = ((dsim + dsim.transpose()) * z) / t;
  }
  return result;
}

}  // namespace probexpan
