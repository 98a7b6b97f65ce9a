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

#include "probexpan/ensemble.h"

#include <algorithm>
#include <cmath>

#include "probexpan/losses.h"

namespace probexpan {

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error("KL divergence: length mismatch");
  if (p.empty()) return 0.0;
  double p_sum = 0.0, q_sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p_sum += std::max(p[i], kLogFloor);
    q_sum += std::max(q[i], kLogFloor);
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = std::max(p[i], kLogFloor) / p_sum;
    const double b = std::max(q[i], kLogFloor) / q_sum;
    kl += a * std::log(a / b);
  }
  return std::max(kl, 0.0);
}

double ScoreModelOnClass(std::span<const Distribution> reps,
                         std::span<const EntityId> seeds) {
  const std::size_t m = seeds.size();
  if (m < 2) throw Error("class score needs at least 2 seeds");
  for (EntityId s : seeds) {
    if (s < 0 || static_cast<std::size_t>(s) >= reps.size()) {
      throw Error("class score: seed without representation");
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) total += KlDivergence(reps[seeds[i]], reps[seeds[j]]);
    }
  }
  return -total / static_cast<double>(m * (m - 1));
}

double ScoreModelOverall(std::span<const double> class_scores) {
  if (class_scores.empty()) throw Error("overall score needs >= 1 class");
  double log_sum = 0.0;
  for (double s : class_scores) {
    log_sum += std::log(std::max(std::abs(s), kLogFloor));
  }
  return -std::exp(log_sum / static_cast<double>(class_scores.size()));
}

std::vector<ModelScore> ScoreModels(
    std::span<const std::vector<Distribution>> reps,
    std::span<const std::vector<EntityId>> class_seeds) {
  std::vector<ModelScore> scores;
  for (std::size_t m = 0; m < reps.size(); ++m) {
    ModelScore s;
    s.model = static_cast<int>(m);
    for (const auto& seeds : class_seeds) {
      s.per_class.push_back(ScoreModelOnClass(reps[m], seeds));
    }
    s.overall = ScoreModelOverall(s.per_class);
    scores.push_back(std::move(s));
  }
  return scores;
}

std::vector<ModelScore> SelectTopK(std::span<const ModelScore> scores, int k) {
  if (k < 1 || k > static_cast<int>(scores.size())) {
    throw Error("select top-k: k=" + std::to_string(k) + " with " +
                std::to_string(scores.size()) + " models");
  }
  std::vector<ModelScore> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ModelScore& a, const ModelScore& b) {
              if (a.overall != b.overall) return a.overall > b.overall;
              return a.model < b.model;
            });
  sorted.resize(k);
  return sorted;
}

PredictionCache BuildPredictionCache(
    std::span<const std::vector<Distribution>* const> selected,
    std::vector<std::uint64_t> provenance) {
  if (selected.empty()) throw Error("prediction cache: no models selected");
  const std::size_t ve = selected.front()->size();
  std::vector<Distribution> rows(ve, Distribution(ve, 0.0));
  for (const auto* reps : selected) {
    if (reps->size() != ve) throw Error("prediction cache: size mismatch");
    for (std::size_t e = 0; e < ve; ++e) {
      const Distribution& r = (*reps)[e];
      if (r.size() != ve) throw Error("prediction cache: row size mismatch");
      for (std::size_t j = 0; j < ve; ++j) rows[e][j] += r[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(selected.size());
  for (auto& row : rows) {
    for (double& v : row) v *= inv;
  }
  return PredictionCache(std::move(rows), std::move(provenance));
}

}  // namespace probexpan
