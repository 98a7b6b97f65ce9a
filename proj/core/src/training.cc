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

#include "probexpan/training.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace probexpan {
namespace {

// RNG stream ids, kept apart so adding a consumer never shifts another.
constexpr std::uint64_t kEpochStream = 1000;
constexpr std::uint64_t kPairStream = 500000;

int PickSample(const Corpus& corpus, EntityId entity, std::mt19937_64& rng) {
  auto own = corpus.SamplesOf(entity);
  if (own.empty()) {
    throw Error("entity " + std::to_string(entity) + " has no samples to pair");
  }
  std::uniform_int_distribution<std::size_t> pick(0, own.size() - 1);
  return own[pick(rng)];
}

// A second sample of `entity` distinct from `first` when one exists.
int PickOtherSample(const Corpus& corpus, EntityId entity, int first,
                    std::mt19937_64& rng) {
  auto own = corpus.SamplesOf(entity);
  if (own.size() < 2) return first;
  std::uniform_int_distribution<std::size_t> pick(0, own.size() - 2);
  const int candidate = own[pick(rng)];
  return candidate == first ? own.back() : candidate;
}

struct BatchRunner {
  const Corpus& corpus;
  std::vector<const MaskedSample*> ptrs;

  std::span<const MaskedSample* const> Gather(std::span<const int> indices) {
    ptrs.clear();
    for (int i : indices) ptrs.push_back(&corpus.sample(i));
    return ptrs;
  }
};

LossSpec PredictionSpec(const TrainingConfig& config) {
  LossSpec spec;
  spec.mode = LossMode::kPrediction;
  spec.smoothing = config.smoothing;
  return spec;
}

}  // namespace

void PhasePlan::Validate() const {
  if (n_models < 1 || top_k < 1 || epochs_phase1 < 0 || epochs_phase3 < 0 ||
      cl_rounds < 1 || batch_size < 1 || cl_pairs < 2) {
    throw Error("phase plan: invalid counts");
  }
  if (top_k > n_models) throw Error("phase plan: top_k exceeds n_models");
  if (!(lr_pred > 0.0) || !(lr_cl > 0.0)) {
    throw Error("phase plan: learning rates must be > 0");
  }
  if (!(pos_fraction >= 0.0 && pos_fraction <= 1.0)) {
    throw Error("phase plan: pos_fraction must be in [0, 1]");
  }
}

std::vector<EntityId> SelectPositiveEntities(std::span<const EntityId> ranked,
                                             std::span<const EntityId> seeds,
                                             int thr_pos) {
  std::vector<EntityId> out(seeds.begin(), seeds.end());
  const int top = std::clamp(thr_pos, 0, static_cast<int>(ranked.size()));
  out.insert(out.end(), ranked.begin(), ranked.begin() + top);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<EntityId> SelectNegativeEntities(std::span<const EntityId> ranked,
                                             int lower_neg, int upper_neg) {
  std::vector<EntityId> out;
  for (int rank = std::max(lower_neg + 1, 0);
       rank < upper_neg && rank < static_cast<int>(ranked.size()); ++rank) {
    out.push_back(ranked[rank]);
  }
  if (out.empty()) {
    throw Error("no negatives in interval (" + std::to_string(lower_neg) +
                ", " + std::to_string(upper_neg) + ") of a ranked list of " +
                std::to_string(ranked.size()));
  }
  return out;
}

PairBatch BuildPairBatch(std::span<const EntityId> positives,
                         std::span<const EntityId> negatives,
                         const Corpus& corpus, int num_pairs,
                         double pos_fraction, std::uint64_t seed) {
  if (num_pairs < 1) throw Error("pair batch: need at least one pair");
  const int n_pos = static_cast<int>(std::lround(num_pairs * pos_fraction));
  const int n_neg = num_pairs - n_pos;
  if (n_pos > 0 && positives.empty()) {
    throw Error("pair batch: no positive entities");
  }
  if (n_neg > 0 && negatives.empty()) {
    throw Error("pair batch: no negative entities");
  }
  std::mt19937_64 rng(seed);
  PairBatch batch;
  batch.samples.reserve(2 * num_pairs);
  std::uniform_int_distribution<std::size_t> pick_pos(
      0, positives.empty() ? 0 : positives.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_neg(
      0, negatives.empty() ? 0 : negatives.size() - 1);

  for (int m = 0; m < n_pos; ++m) {
    const EntityId a = positives[pick_pos(rng)];
    const EntityId b = positives[pick_pos(rng)];
    const int x = PickSample(corpus, a, rng);
    const int y = a == b ? PickOtherSample(corpus, b, x, rng)
                         : PickSample(corpus, b, rng);
    batch.samples.push_back(corpus.sample(x));
    batch.samples.push_back(corpus.sample(y));
    batch.kinds.push_back(PairKind::kPositive);
  }
  for (int m = 0; m < n_neg; ++m) {
    const EntityId e = negatives[pick_neg(rng)];
    const int x = PickSample(corpus, e, rng);
    const int y = PickOtherSample(corpus, e, x, rng);
    if (x == y) ++batch.self_pairs;
    batch.samples.push_back(corpus.sample(x));
    batch.samples.push_back(corpus.sample(y));
    batch.kinds.push_back(PairKind::kNegative);
  }
  return batch;
}

void WriteEpochRecord(std::ostream& out, const EpochRecord& r) {
  char line[256];
  std::snprintf(line, sizeof(line),
                "phase=%d model=%d epoch=%d pred_loss=%.9f cl_loss=%.9f "
                "pred_batches=%d cl_batches=%d self_pairs=%d\n",
                r.phase, r.model, r.epoch, r.pred_loss, r.cl_loss,
                r.pred_batches, r.cl_batches, r.self_pairs);
  out << line;
}

ModelParams TrainPhase1(const Corpus& corpus, const ModelDims& dims,
                        const TrainingConfig& config,
                        const SeedLineage& lineage,
                        const EpochCallback& on_epoch) {
  config.plan.Validate();
  config.smoothing.Validate();
  ModelParams params = InitParams(dims, lineage.init_seed);
  params.lineage = lineage;
  AdamW optimizer(dims, config.optimizer);
  const LossSpec spec = PredictionSpec(config);
  BatchRunner runner{corpus, {}};
  const int bs = config.plan.batch_size;

  for (int epoch = 0; epoch < config.plan.epochs_phase1; ++epoch) {
    const auto order = BalancedEpochSamples(
        corpus, DeriveSeed(lineage.init_seed, kEpochStream + epoch));
    EpochRecord record{1, static_cast<int>(lineage.model_index), epoch};
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const auto len = std::min<std::size_t>(bs, order.size() - start);
      const auto batch = runner.Gather(std::span(order).subspan(start, len));
      const LossResult r = LossAndGrad(params, batch, spec);
      optimizer.Step(params, r.grad, config.plan.lr_pred);
      record.pred_loss += r.loss;
      ++record.pred_batches;
    }
    if (record.pred_batches) record.pred_loss /= record.pred_batches;
    if (!params.AllFinite()) {
      throw Error("phase 1 diverged: model " + std::to_string(record.model) +
                  " epoch " + std::to_string(epoch));
    }
    if (on_epoch) on_epoch(record);
  }
  return params;
}

std::vector<ContrastiveSets> MineContrastiveSets(
    std::span<const ExpansionTarget> targets, const ContrastiveConfig& cfg) {
  if (targets.empty()) throw Error("contrastive training: no targets");
  std::vector<ContrastiveSets> sets;
  for (const auto& t : targets) {
    ContrastiveSets s;
    s.positives = SelectPositiveEntities(t.ranked, t.seeds, cfg.thr_pos);
    s.negatives = SelectNegativeEntities(t.ranked, cfg.lower_neg, cfg.upper_neg);
    sets.push_back(std::move(s));
  }
  return sets;
}

ModelParams TrainPhase3(ModelParams params, const Corpus& corpus,
                        std::span<const ExpansionTarget> targets,
                        const TrainingConfig& config, std::uint64_t seed,
                        const EpochCallback& on_epoch) {
  config.plan.Validate();
  config.smoothing.Validate();
  config.contrastive.Validate();
  const PhasePlan& plan = config.plan;
  std::vector<ContrastiveSets> sets;
  if (plan.contrastive) sets = MineContrastiveSets(targets, config.contrastive);

  AdamW pred_opt(params.dims, config.optimizer);
  AdamW cl_opt(params.dims, config.optimizer);
  const LossSpec pred_spec = PredictionSpec(config);
  LossSpec cl_spec;
  cl_spec.mode = LossMode::kContrastive;
  cl_spec.contrastive = config.contrastive;
  const double neg_floor = std::exp(-1.0 / config.contrastive.temperature);

  BatchRunner runner{corpus, {}};
  const int bs = plan.batch_size;
  std::uint64_t cl_step = 0;
  const int model = static_cast<int>(params.lineage.model_index);

  for (int epoch = 0; epoch < plan.epochs_phase3; ++epoch) {
    const auto order =
        BalancedEpochSamples(corpus, DeriveSeed(seed, kEpochStream + epoch));
    EpochRecord record{3, model, epoch};
    for (std::size_t start = 0; start < order.size(); start += bs) {
      const auto len = std::min<std::size_t>(bs, order.size() - start);
      const auto batch = runner.Gather(std::span(order).subspan(start, len));
      const LossResult pr = LossAndGrad(params, batch, pred_spec);
      pred_opt.Step(params, pr.grad, plan.lr_pred);
      record.pred_loss += pr.loss;
      ++record.pred_batches;

      if (!plan.contrastive) continue;
      const ContrastiveSets& s = sets[cl_step % sets.size()];
      const PairBatch pairs =
          BuildPairBatch(s.positives, s.negatives, corpus, plan.cl_pairs,
                         plan.pos_fraction, DeriveSeed(seed, kPairStream + cl_step));
      ++cl_step;
      record.self_pairs += pairs.self_pairs;
      const LossResult cr = LossAndGrad(
          params, std::span<const MaskedSample>(pairs.samples), cl_spec);
      for (double neg : cr.negative_terms) {
        if (neg < neg_floor) throw Error("contrastive negative term below clamp");
      }
      cl_opt.Step(params, cr.grad, plan.lr_cl);
      record.cl_loss += cr.loss;
      ++record.cl_batches;
    }
    if (record.pred_batches) record.pred_loss /= record.pred_batches;
    if (record.cl_batches) record.cl_loss /= record.cl_batches;
    if (!params.AllFinite()) {
      throw Error("phase 3 diverged: model " + std::to_string(model) +
                  " epoch " + std::to_string(epoch));
    }
    if (on_epoch) on_epoch(record);
  }
  return params;
}

}  // namespace probexpan
