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

// Entity-level masked prediction model.
//
//   encoder g:     h = gelu(enc_w * mean(token_embeddings[tokens]) + enc_b)
//   head f:        p = softmax(head_w2 * gelu(head_w1 * h + head_b1) + head_b2)
//   projection p:  z = normalize(proj_w * h + proj_b)
//
// Mean pooling includes the mask token. GeLU is the tanh approximation. The
// encoder lives in EncodeBatch/EncoderBackward so a different encoder only
// has to replace those two entry points.

#ifndef PROBEXPAN_MODEL_H_
#define PROBEXPAN_MODEL_H_

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "probexpan/common.h"
#include "probexpan/corpus.h"
#include "probexpan/losses.h"

namespace probexpan {

struct ModelDims {
  int token_vocab = 0;   // V_t
  int entity_vocab = 0;  // V_e
  int hidden = 64;       // H
  int projection = 32;   // D

  void Validate() const;
  bool operator==(const ModelDims&) const = default;
};

// Seeds a model was derived from; persisted with checkpoints.
struct SeedLineage {
  std::uint64_t master_seed = 0;
  std::uint64_t model_index = 0;
  std::uint64_t init_seed = 0;

  bool operator==(const SeedLineage&) const = default;
};

struct ModelParams {
  ModelDims dims;
  SeedLineage lineage;

  Matrix token_embeddings;  // V_t x H
  Matrix enc_w;             // H x H
  Vector enc_b;             // H
  Matrix head_w1;           // H x H
  Vector head_b1;           // H
  Matrix head_w2;           // V_e x H
  Vector head_b2;           // V_e
  Matrix proj_w;            // D x H
  Vector proj_b;            // D

  static constexpr int kNumTensors = 9;
  static constexpr std::array<std::string_view, kNumTensors> kTensorNames = {
      "token_embeddings", "enc_w",   "enc_b",  "head_w1", "head_b1",
      "head_w2",          "head_b2", "proj_w", "proj_b"};

  static ModelParams Zeros(const ModelDims& dims);

  // Tensor storage in canonical (checkpoint) order.
  std::array<std::span<double>, kNumTensors> Tensors();
  std::array<std::span<const double>, kNumTensors> Tensors() const;

  std::size_t ParameterCount() const;
  bool AllFinite() const;
  void SetZero();
  // this += scale * other.
  void AddScaled(const ModelParams& other, double scale);

  bool operator==(const ModelParams& other) const;
};

double Gelu(double x);
double GeluDerivative(double x);

// Kaiming-uniform weights (bound sqrt(6 / fan_in)), token embeddings uniform in
// [-0.05, 0.05], all biases zero.
ModelParams InitParams(const ModelDims& dims, std::uint64_t seed);

Vector Encode(const ModelParams& params, const MaskedSample& sample);
Distribution Predict(const ModelParams& params, const MaskedSample& sample);
// Throws Error("degenerate projection") when the pre-normalization vector is 0.
Vector Project(const ModelParams& params, const MaskedSample& sample);

// Batched predictions, one row per sample.
Matrix PredictBatch(const ModelParams& params,
                    std::span<const MaskedSample* const> samples);

// Mean prediction over every sample of `entity`.
Distribution EntityRepresentation(const ModelParams& params,
                                  const Corpus& corpus, EntityId entity);
// Representations for all entities, indexed by entity id.
std::vector<Distribution> AllEntityRepresentations(const ModelParams& params,
                                                   const Corpus& corpus);

enum class LossMode { kPrediction, kContrastive };

struct LossSpec {
  LossMode mode = LossMode::kPrediction;
  SmoothingConfig smoothing;
  ContrastiveConfig contrastive;
};

struct LossResult {
  double loss = 0.0;
  ModelParams grad;
  // Contrastive mode only: the clamped S-_i of each row.
  std::vector<double> negative_terms;
};

// Loss and analytic gradient for one batch. Prediction mode averages the
// label-smoothing loss over the batch; contrastive mode sums the contrastive
// loss over the 2N paired samples. Throws Error on a non-finite loss.
LossResult LossAndGrad(const ModelParams& params,
                       std::span<const MaskedSample* const> batch,
                       const LossSpec& spec);
LossResult LossAndGrad(const ModelParams& params,
                       std::span<const MaskedSample> batch,
                       const LossSpec& spec);

// Loss only; used by finite-difference checks.
double Loss(const ModelParams& params, std::span<const MaskedSample> batch,
            const LossSpec& spec);

}  // namespace probexpan

#endif  // PROBEXPAN_MODEL_H_
