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

// Model selection by seed-representation consistency, and ensembling.

#ifndef PROBEXPAN_ENSEMBLE_H_
#define PROBEXPAN_ENSEMBLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "probexpan/common.h"
#include "probexpan/prediction_cache.h"

namespace probexpan {

// KL(p || q) after flooring both operands at 1e-12 and renormalizing.
// Never negative. Throws Error on length mismatch.
double KlDivergence(std::span<const double> p, std::span<const double> q);

// -(sum over ordered pairs i != j of KL(r_i || r_j)) / (M (M - 1)).
// `reps` is indexed by entity id. Throws Error when fewer than two seeds.
double ScoreModelOnClass(std::span<const Distribution> reps,
                         std::span<const EntityId> seeds);

// Negated geometric mean of |score|, each magnitude floored at 1e-12.
double ScoreModelOverall(std::span<const double> class_scores);

struct ModelScore {
  int model = 0;
  double overall = 0.0;
  std::vector<double> per_class;
};

// Scores every model (reps[m] is model m's per-entity representation table).
std::vector<ModelScore> ScoreModels(
    std::span<const std::vector<Distribution>> reps,
    std::span<const std::vector<EntityId>> class_seeds);

// Best k by overall score (closest to 0 first); ties by model index.
// Throws Error when k is outside [1, scores.size()].
std::vector<ModelScore> SelectTopK(std::span<const ModelScore> scores, int k);

// Entity-wise mean of the selected models' representations.
PredictionCache BuildPredictionCache(
    std::span<const std::vector<Distribution>* const> selected,
    std::vector<std::uint64_t> provenance);

}  // namespace probexpan

#endif  // PROBEXPAN_ENSEMBLE_H_
