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

#include "probexpan/expansion.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "probexpan/ensemble.h"

namespace probexpan {

void ExpansionConfig::Validate() const {
  if (initial_window < 1) throw Error("expansion: w0 must be >= 1");
  if (window_growth < 0) throw Error("expansion: growth must be >= 0");
  if (growth_step < 1) throw Error("expansion: step must be >= 1");
  if (stage_step < 1) throw Error("expansion: tau-stage must be >= 1");
  if (alpha && !(*alpha > 0.0)) throw Error("expansion: alpha must be > 0");
  if (target_size < 1) throw Error("expansion: target size must be >= 1");
  if (!(anchor_sharpness > 0.0)) {
    throw Error("expansion: anchor sharpness must be > 0");
  }
}

double ExpansionConfig::AlphaFor(int num_entities) const {
  return alpha ? *alpha : static_cast<double>(num_entities) / 10.0;
}

Distribution SetRepresentation(const PredictionCache& cache,
                               std::span<const EntityId> current) {
  if (current.empty()) throw Error("set representation of an empty set");
  Distribution rep(cache.num_entities(), 0.0);
  for (EntityId e : current) {
    if (e < 0 || e >= cache.num_entities()) {
      throw Error("entity " + std::to_string(e) + " is not cached");
    }
    const auto row = cache.row(e);
    for (std::size_t j = 0; j < rep.size(); ++j) rep[j] += row[j];
  }
  const double inv = 1.0 / static_cast<double>(current.size());
  for (double& v : rep) v *= inv;
  return rep;
}

std::vector<EntityId> CandidateList(std::span<const double> set_rep,
                                    std::span<const EntityId> current) {
  std::vector<bool> taken(set_rep.size(), false);
  for (EntityId e : current) {
    if (e >= 0 && static_cast<std::size_t>(e) < taken.size()) taken[e] = true;
  }
  std::vector<EntityId> out;
  out.reserve(set_rep.size());
  for (std::size_t e = 0; e < set_rep.size(); ++e) {
    if (!taken[e]) out.push_back(static_cast<EntityId>(e));
  }
  std::stable_sort(out.begin(), out.end(), [&](EntityId a, EntityId b) {
    return set_rep[a] > set_rep[b];
  });
  return out;
}

int WindowSize(const ExpansionConfig& cfg, int current_size) {
  return cfg.initial_window + cfg.window_growth * (current_size / cfg.growth_step);
}

Distribution AnchorDistribution(EntityId candidate,
                                std::span<const double> candidate_rep,
                                std::span<const EntityId> current,
                                const ExpansionConfig& cfg) {
  const int ve = static_cast<int>(candidate_rep.size());
  if (candidate < 0 || candidate >= ve) {
    throw Error("anchor: candidate out of range");
  }
  if (std::find(current.begin(), current.end(), candidate) != current.end()) {
    throw Error("anchor: candidate " + std::to_string(candidate) +
                " is already in the current set");
  }
  const double base = 1.0 / ve;
  const double alpha = cfg.AlphaFor(ve);
  Distribution d(ve, base);
  d[candidate] = candidate_rep[candidate];
  for (std::size_t i = 0; i < current.size(); ++i) {
    const int stage = static_cast<int>(i) / cfg.stage_step;
    d[current[i]] = base * alpha * std::ldexp(1.0, -stage);
  }
  for (double& v : d) v *= cfg.anchor_sharpness;
  return Softmax(d);
}

double CandidateScore(const PredictionCache& cache, EntityId candidate,
                      std::span<const EntityId> current,
                      const ExpansionConfig& cfg) {
  const auto rep = cache.row(candidate);
  const Distribution anchor = AnchorDistribution(candidate, rep, current, cfg);
  return -KlDivergence(rep, anchor);
}

EntityId WindowSearch(std::span<const EntityId> candidates,
                      std::span<const EntityId> current,
                      const PredictionCache& cache,
                      const ExpansionConfig& cfg) {
  if (candidates.empty()) throw Error("window search: empty candidate list");
  const int window = std::min<int>(
      WindowSize(cfg, static_cast<int>(current.size())),
      static_cast<int>(candidates.size()));
  EntityId best = candidates.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < window; ++c) {
    const double s = CandidateScore(cache, candidates[c], current, cfg);
    if (s > best_score) {
      best_score = s;
      best = candidates[c];
    }
  }
  return best;
}

ExpansionState Expand(std::span<const EntityId> seeds,
                      const PredictionCache& cache,
                      const ExpansionConfig& cfg) {
  cfg.Validate();
  if (seeds.empty()) throw Error("expand: no seeds");
  ExpansionState state;
  for (EntityId s : seeds) {
    if (s < 0 || s >= cache.num_entities()) {
      throw Error("expand: seed " + std::to_string(s) + " is not cached");
    }
    if (std::find(state.current.begin(), state.current.end(), s) ==
        state.current.end()) {
      state.current.push_back(s);
    }
  }
  state.num_seeds = static_cast<int>(state.current.size());
  if (cfg.target_size > cache.num_entities() - state.num_seeds) {
    throw Error("expand: target size " + std::to_string(cfg.target_size) +
                " exceeds the " +
                std::to_string(cache.num_entities() - state.num_seeds) +
                " available entities");
  }
  while (static_cast<int>(state.current.size()) - state.num_seeds <
         cfg.target_size) {
    const Distribution rep = SetRepresentation(cache, state.current);
    const std::vector<EntityId> candidates = CandidateList(rep, state.current);
    if (candidates.empty()) throw Error("expand: candidate list exhausted");
    state.current.push_back(WindowSearch(candidates, state.current, cache, cfg));
  }
  return state;
}

double AggregationScore(int order, int rank) {
  if (order < 1 || rank < 1) {
    throw Error("aggregation score: order and rank must be >= 1");
  }
  return std::sqrt(1.0 / (static_cast<double>(order) * rank));
}

std::vector<RankedEntity> Rerank(const ExpansionState& state,
                                 const PredictionCache& cache,
                                 const ExpansionConfig& cfg) {
  const auto expanded = state.expanded();
  std::vector<RankedEntity> out;
  out.reserve(expanded.size());
  std::vector<EntityId> others;
  for (std::size_t k = 0; k < expanded.size(); ++k) {
    const std::size_t pos = state.num_seeds + k;
    others.assign(state.current.begin(), state.current.begin() + pos);
    others.insert(others.end(), state.current.begin() + pos + 1,
                  state.current.end());
    RankedEntity r;
    r.entity = expanded[k];
    r.order = static_cast<int>(k) + 1;
    r.consistency = CandidateScore(cache, r.entity, others, cfg);
    out.push_back(r);
  }

  std::vector<std::size_t> by_score(out.size());
  std::iota(by_score.begin(), by_score.end(), 0);
  std::stable_sort(by_score.begin(), by_score.end(),
                   [&](std::size_t a, std::size_t b) {
                     return out[a].consistency > out[b].consistency;
                   });
  for (std::size_t r = 0; r < by_score.size(); ++r) {
    out[by_score[r]].rank = static_cast<int>(r) + 1;
  }
  for (auto& r : out) {
    r.score = AggregationScore(r.order, r.rank);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankedEntity& a, const RankedEntity& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.order < b.order;
                   });
  return out;
}

}  // namespace probexpan
