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

// Probabilistic set expansion with window search and re-ranking.
//
// Each step averages the cached distributions of the current set, ranks the
// remaining entities by that average, and scores the first w candidates by
// s(e) = -KL(r(e) || d(e)), where d(e) is an anchor distribution built from
// the current set. The best candidate is appended. Once the target size is
// reached the expanded entities are re-ranked by combining expansion order
// with their s(e) rank against the final set.

#ifndef PROBEXPAN_EXPANSION_H_
#define PROBEXPAN_EXPANSION_H_

#include <optional>
#include <span>
#include <vector>

#include "probexpan/common.h"
#include "probexpan/prediction_cache.h"

namespace probexpan {

struct ExpansionConfig {
  int initial_window = 5;  // w0
  int window_growth = 2;   // g
  int growth_step = 10;    // s
  // Anchor scale; unset means V_e / 10.
  std::optional<double> alpha;
  int stage_step = 5;  // anchor mass halves every stage_step members
  int target_size = 100;
  double anchor_sharpness = 1.0;

  void Validate() const;
  double AlphaFor(int num_entities) const;
};

struct ExpansionState {
  // Seeds first, then expanded entities in expansion order.
  std::vector<EntityId> current;
  int num_seeds = 0;

  std::span<const EntityId> seeds() const {
    return std::span(current).first(num_seeds);
  }
  std::span<const EntityId> expanded() const {
    return std::span(current).subspan(num_seeds);
  }
};

// Mean of the cached rows of `current`.
Distribution SetRepresentation(const PredictionCache& cache,
                               std::span<const EntityId> current);

// Entities by descending probability (ties by id), minus `current`.
std::vector<EntityId> CandidateList(std::span<const double> set_rep,
                                    std::span<const EntityId> current);

// w0 + g * floor(current_size / s).
int WindowSize(const ExpansionConfig& cfg, int current_size);

// Base 1/V_e everywhere, the candidate's own probability at its index, and
// (1/V_e) * alpha * 2^-floor(i / stage_step) for the i-th current member;
// then softmax(anchor_sharpness * d).
Distribution AnchorDistribution(EntityId candidate,
                                std::span<const double> candidate_rep,
                                std::span<const EntityId> current,
                                const ExpansionConfig& cfg);

// s(e) = -KL(cache[e] || anchor); always <= 0.
double CandidateScore(const PredictionCache& cache, EntityId candidate,
                      std::span<const EntityId> current,
                      const ExpansionConfig& cfg);

// Best-scoring entity among the first min(w, |candidates|) candidates, with w
// from WindowSize(cfg, |current|). Ties go to the earlier candidate.
EntityId WindowSearch(std::span<const EntityId> candidates,
                      std::span<const EntityId> current,
                      const PredictionCache& cache, const ExpansionConfig& cfg);

// Grows the seed set one entity per step until target_size entities have
// been added.
ExpansionState Expand(std::span<const EntityId> seeds,
                      const PredictionCache& cache, const ExpansionConfig& cfg);

struct RankedEntity {
  EntityId entity = 0;
  int order = 0;  // 1-based expansion order
  int rank = 0;   // 1-based position by s(e) against the final set
  double score = 0.0;        // sqrt(1 / (order * rank))
  double consistency = 0.0;  // s(e)
};

// sqrt(1 / (order * rank)) for 1-based order and rank.
double AggregationScore(int order, int rank);

// Re-ranks the expanded entities; seeds are not part of the output.
std::vector<RankedEntity> Rerank(const ExpansionState& state,
                                 const PredictionCache& cache,
                                 const ExpansionConfig& cfg);

}  // namespace probexpan

#endif  // PROBEXPAN_EXPANSION_H_
