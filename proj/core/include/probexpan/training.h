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

// Training: positive/negative entity mining from a previous expansion,
// contrastive pair batches, and the two training phases.
//
// Ranks are 0-based positions in a ranked list. An entity is positive when it
// is a seed or its rank is < thr_pos; it is negative when
// lower_neg < rank < upper_neg (strict on both ends).

#ifndef PROBEXPAN_TRAINING_H_
#define PROBEXPAN_TRAINING_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "probexpan/corpus.h"
#include "probexpan/losses.h"
#include "probexpan/model.h"
#include "probexpan/optimizer.h"

namespace probexpan {

struct PhasePlan {
  int n_models = 5;
  int top_k = 3;
  int epochs_phase1 = 8;
  int epochs_phase3 = 3;
  int cl_rounds = 1;
  double lr_pred = 5e-3;
  double lr_cl = 1e-3;
  int batch_size = 32;
  int cl_pairs = 8;  // N; a contrastive batch holds 2N samples
  double pos_fraction = 0.5;
  // When false, phase 3 runs only prediction batches.
  bool contrastive = true;

  void Validate() const;
};

struct TrainingConfig {
  SmoothingConfig smoothing;
  ContrastiveConfig contrastive;
  PhasePlan plan;
  AdamWConfig optimizer;
};

// Returns the positive set sorted by entity id.
std::vector<EntityId> SelectPositiveEntities(std::span<const EntityId> ranked,
                                             std::span<const EntityId> seeds,
                                             int thr_pos);

// Returns the negative set in rank order. Throws Error("no negatives in
// interval") when empty.
std::vector<EntityId> SelectNegativeEntities(std::span<const EntityId> ranked,
                                             int lower_neg, int upper_neg);

enum class PairKind { kPositive, kNegative };

struct PairBatch {
  // Samples 2m and 2m+1 form pair m.
  std::vector<MaskedSample> samples;
  std::vector<PairKind> kinds;
  // Negative pairs that reused one sample because the entity had only one.
  int self_pairs = 0;

  int num_pairs() const { return static_cast<int>(kinds.size()); }
};

// lround(num_pairs * pos_fraction) positive pairs (two samples of entities in
// `positives`), then negative pairs (two samples of one entity in
// `negatives`). Deterministic in `seed`.
PairBatch BuildPairBatch(std::span<const EntityId> positives,
                         std::span<const EntityId> negatives,
                         const Corpus& corpus, int num_pairs,
                         double pos_fraction, std::uint64_t seed);

struct EpochRecord {
  int phase = 0;
  int model = 0;
  int epoch = 0;
  double pred_loss = 0.0;
  double cl_loss = 0.0;  // 0 when no contrastive batches ran
  int pred_batches = 0;
  int cl_batches = 0;
  // Negative pairs that had to reuse a single sample.
  int self_pairs = 0;
};

// One structured line per record.
void WriteEpochRecord(std::ostream& out, const EpochRecord& record);

using EpochCallback = std::function<void(const EpochRecord&)>;

// Masked entity prediction only, on balanced epochs. Zero epochs returns the
// initialized parameters.
ModelParams TrainPhase1(const Corpus& corpus, const ModelDims& dims,
                        const TrainingConfig& config,
                        const SeedLineage& lineage,
                        const EpochCallback& on_epoch = {});

// Seeds and previous ranked expansion for one query.
struct ExpansionTarget {
  std::vector<EntityId> seeds;
  std::vector<EntityId> ranked;
};

struct ContrastiveSets {
  std::vector<EntityId> positives;
  std::vector<EntityId> negatives;
};

std::vector<ContrastiveSets> MineContrastiveSets(
    std::span<const ExpansionTarget> targets, const ContrastiveConfig& cfg);

// Continues training `params`, alternating one prediction batch and one
// contrastive batch (targets cycled round-robin) per step.
ModelParams TrainPhase3(ModelParams params, const Corpus& corpus,
                        std::span<const ExpansionTarget> targets,
                        const TrainingConfig& config, std::uint64_t seed,
                        const EpochCallback& on_epoch = {});

}  // namespace probexpan

#endif  // PROBEXPAN_TRAINING_H_
