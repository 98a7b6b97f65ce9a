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


#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "probexpan/expansion.h"
#include "probexpan/losses.h"
#include "probexpan/model.h"

namespace probexpan {
namespace {

std::vector<MaskedSample> Samples(const ModelDims& dims, int count,
                                  std::mt19937_64& rng) {
  std::uniform_int_distribution<TokenId> token(1, dims.token_vocab - 1);
  std::uniform_int_distribution<EntityId> entity(0, dims.entity_vocab - 1);
  std::vector<MaskedSample> out(count);
  for (auto& s : out) {
    s.token_ids = {token(rng), 0, token(rng), token(rng), token(rng), token(rng)};
    s.mask_pos = 1;
    s.entity_id = entity(rng);
  }
  return out;
}

void BM_PredictionLossAndGrad(benchmark::State& state) {
  const ModelDims dims{400, static_cast<int>(state.range(0)), 64, 32};
  std::mt19937_64 rng(1);
  const ModelParams params = InitParams(dims, 1);
  const auto batch = Samples(dims, 32, rng);
  LossSpec spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(LossAndGrad(params, batch, spec).loss);
  }
  state.SetItemsProcessed(state.iterations() * batch.size());
}
BENCHMARK(BM_PredictionLossAndGrad)->Arg(240)->Arg(2000);

void BM_ContrastiveLossAndGrad(benchmark::State& state) {
  const ModelDims dims{400, 240, 64, 32};
  std::mt19937_64 rng(2);
  const ModelParams params = InitParams(dims, 2);
  const auto batch = Samples(dims, 2 * static_cast<int>(state.range(0)), rng);
  LossSpec spec;
  spec.mode = LossMode::kContrastive;
  for (auto _ : state) {
    benchmark::DoNotOptimize(LossAndGrad(params, batch, spec).loss);
  }
}
BENCHMARK(BM_ContrastiveLossAndGrad)->Arg(8)->Arg(32);

void BM_ContrastiveLossOnly(benchmark::State& state) {
  const int rows = 2 * static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Matrix z(rows, 32);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < 32; ++j) z(i, j) = g(rng);
    z.row(i).normalize();
  }
  ContrastiveConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ContrastiveLoss(z, cfg, true).loss);
  }
}
BENCHMARK(BM_ContrastiveLossOnly)->Arg(8)->Arg(64);

PredictionCache RandomCache(int n, std::mt19937_64& rng) {
  std::gamma_distribution<double> g(0.3);
  std::vector<Distribution> rows(n, Distribution(n));
  for (auto& row : rows) {
    double total = 0.0;
    for (double& v : row) total += (v = g(rng) + 1e-9);
    for (double& v : row) v /= total;
  }
  return PredictionCache(std::move(rows), {});
}

void BM_WindowSearch(benchmark::State& state) {
  const int ve = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  const PredictionCache cache = RandomCache(ve, rng);
  std::vector<EntityId> current{0, 1, 2};
  ExpansionConfig cfg;
  const auto candidates =
      CandidateList(SetRepresentation(cache, current), current);
  for (auto _ : state) {
    benchmark::DoNotOptimize(WindowSearch(candidates, current, cache, cfg));
  }
}
BENCHMARK(BM_WindowSearch)->Arg(240)->Arg(2000);

void BM_Expand(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const PredictionCache cache = RandomCache(240, rng);
  ExpansionConfig cfg;
  cfg.target_size = static_cast<int>(state.range(0));
  const std::vector<EntityId> seeds{0, 1, 2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(Expand(seeds, cache, cfg).current.size());
  }
}
BENCHMARK(BM_Expand)->Arg(50)->Arg(100);

}  // namespace
}  // namespace probexpan

BENCHMARK_MAIN();
