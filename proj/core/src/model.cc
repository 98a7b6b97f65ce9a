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

#include "probexpan/model.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <random>

namespace probexpan {
namespace {

constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;
constexpr int kRepresentationChunk = 256;

Matrix GeluOf(const Matrix& x) {
  return x.unaryExpr([](double v) { return Gelu(v); });
}

Matrix GeluDerivativeOf(const Matrix& x) {
  return x.unaryExpr([](double v) { return GeluDerivative(v); });
}

template <typename M>
std::span<double> Span(M& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
template <typename M>
std::span<const double> Span(const M& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

void CheckTokens(const ModelParams& params, const MaskedSample& sample,
                 std::size_t index) {
  if (sample.token_ids.empty()) {
    throw Error("sample " + std::to_string(index) + " is empty");
  }
  for (TokenId t : sample.token_ids) {
    if (t < 0 || t >= params.dims.token_vocab) {
      throw Error("sample " + std::to_string(index) + ": token id " +
                  std::to_string(t) + " out of range");
    }
  }
}

// Encoder activations for a batch.
struct EncoderOutput {
  Matrix pooled;      // B x H
  Matrix pre_hidden;  // B x H
  Matrix hidden;      // B x H
};

EncoderOutput EncodeBatch(const ModelParams& params,
                          std::span<const MaskedSample* const> samples) {
  const int h = params.dims.hidden;
  EncoderOutput out;
  out.pooled = Matrix::Zero(static_cast<Eigen::Index>(samples.size()), h);
  for (std::size_t b = 0; b < samples.size(); ++b) {
    const MaskedSample& s = *samples[b];
    CheckTokens(params, s, b);
    auto row = out.pooled.row(static_cast<Eigen::Index>(b));
    for (TokenId t : s.token_ids) row += params.token_embeddings.row(t);
    row /= static_cast<double>(s.token_ids.size());
  }
  out.pre_hidden = out.pooled * params.enc_w.transpose();
  out.pre_hidden.rowwise() += params.enc_b.transpose();
  out.hidden = GeluOf(out.pre_hidden);
  return out;
}

void EncoderBackward(const ModelParams& params,
                     std::span<const MaskedSample* const> samples,
                     const EncoderOutput& enc, const Matrix& d_hidden,
                     ModelParams& grad) {
  const Matrix d_pre = d_hidden.cwiseProduct(GeluDerivativeOf(enc.pre_hidden));
  grad.enc_w.noalias() += d_pre.transpose() * enc.pooled;
  grad.enc_b += d_pre.colwise().sum().transpose();
  const Matrix d_pooled = d_pre * params.enc_w;
  for (std::size_t b = 0; b < samples.size(); ++b) {
    const MaskedSample& s = *samples[b];
    const double inv = 1.0 / static_cast<double>(s.token_ids.size());
    for (TokenId t : s.token_ids) {
      grad.token_embeddings.row(t) +=
          inv * d_pooled.row(static_cast<Eigen::Index>(b));
    }
  }
}

struct HeadOutput {
  Matrix pre_inner;  // B x H
  Matrix inner;      // B x H
  Matrix probs;      // B x V_e
};

HeadOutput HeadForward(const ModelParams& params, const Matrix& hidden) {
  HeadOutput out;
  out.pre_inner = hidden * params.head_w1.transpose();
  out.pre_inner.rowwise() += params.head_b1.transpose();
  out.inner = GeluOf(out.pre_inner);
  out.probs = out.inner * params.head_w2.transpose();
  out.probs.rowwise() += params.head_b2.transpose();
  for (Eigen::Index b = 0; b < out.probs.rows(); ++b) {
    auto row = out.probs.row(b);
    const double max = row.maxCoeff();
    row = (row.array() - max).exp();
    row /= row.sum();
  }
  return out;
}

struct ProjectionOutput {
  Matrix z;       // B x D, unit rows
  Vector norms;   // B
};

ProjectionOutput ProjectionForward(const ModelParams& params,
                                   const Matrix& hidden) {
  ProjectionOutput out;
  out.z = hidden * params.proj_w.transpose();
  out.z.rowwise() += params.proj_b.transpose();
  out.norms = out.z.rowwise().norm();
  for (Eigen::Index b = 0; b < out.z.rows(); ++b) {
    if (!(out.norms(b) > 0.0)) {
      throw Error("degenerate projection (sample " + std::to_string(b) + ")");
    }
    out.z.row(b) /= out.norms(b);
  }
  return out;
}

LossResult Evaluate(const ModelParams& params,
                    std::span<const MaskedSample* const> batch,
                    const LossSpec& spec, bool want_grad) {
  if (batch.empty()) throw Error("loss: empty batch");
  const int n = static_cast<int>(batch.size());
  const EncoderOutput enc = EncodeBatch(params, batch);

  LossResult result;
  if (want_grad) result.grad = ModelParams::Zeros(params.dims);
  Matrix d_hidden;

  if (spec.mode == LossMode::kPrediction) {
    const double eta = spec.smoothing.eta;
    const HeadOutput head = HeadForward(params, enc.hidden);
    const int ve = params.dims.entity_vocab;
    Matrix d_logits;
    if (want_grad) d_logits = Matrix::Zero(n, ve);
    for (int b = 0; b < n; ++b) {
      const EntityId y = batch[b]->entity_id;
      if (y < 0 || y >= ve) {
        throw Error("sample " + std::to_string(b) + ": label out of range");
      }
      double row_loss = 0.0;
      double active_weight = 0.0;
      for (int j = 0; j < ve; ++j) {
        const double w = j == y ? 1.0 - eta : eta;
        const double p = head.probs(b, j);
        row_loss -= w * std::log(std::max(p, kLogFloor));
        if (p > kLogFloor) {
          active_weight += w;
          if (want_grad) d_logits(b, j) = -w;
        }
      }
      if (!std::isfinite(row_loss)) {
        throw Error("non-finite prediction loss at batch sample " +
                    std::to_string(b));
      }
      result.loss += row_loss;
      if (want_grad) d_logits.row(b) += active_weight * head.probs.row(b);
    }
    result.loss /= n;
    if (!want_grad) return result;

    d_logits /= static_cast<double>(n);
    ModelParams& g = result.grad;
    g.head_w2.noalias() += d_logits.transpose() * head.inner;
    g.head_b2 += d_logits.colwise().sum().transpose();
    const Matrix d_inner = d_logits * params.head_w2;
    const Matrix d_pre_inner =
        d_inner.cwiseProduct(GeluDerivativeOf(head.pre_inner));
    g.head_w1.noalias() += d_pre_inner.transpose() * enc.hidden;
    g.head_b1 += d_pre_inner.colwise().sum().transpose();
    d_hidden = d_pre_inner * params.head_w1;
  } else {
    const ProjectionOutput proj = ProjectionForward(params, enc.hidden);
    ContrastiveResult cl = ContrastiveLoss(proj.z, spec.contrastive, want_grad);
    if (!std::isfinite(cl.loss)) {
      int bad = 0;
      for (int i = 0; i < n; ++i) {
        if (!std::isfinite(cl.negative_terms[i])) bad = i;
      }
      throw Error("non-finite contrastive loss at batch sample " +
                  std::to_string(bad));
    }
    result.loss = cl.loss;
    result.negative_terms = std::move(cl.negative_terms);
    if (!want_grad) return result;

    Matrix d_q(n, params.dims.projection);
    for (int b = 0; b < n; ++b) {
      const auto z = proj.z.row(b);
      const auto dz = cl.grad.row(b);
      d_q.row(b) = (dz - z * z.dot(dz)) / proj.norms(b);
    }
    ModelParams& g = result.grad;
    g.proj_w.noalias() += d_q.transpose() * enc.hidden;
    g.proj_b += d_q.colwise().sum().transpose();
    d_hidden = d_q * params.proj_w;
  }

  EncoderBackward(params, batch, enc, d_hidden, result.grad);
  return result;
}

std::vector<const MaskedSample*> Pointers(std::span<const MaskedSample> batch) {
  std::vector<const MaskedSample*> out;
  out.reserve(batch.size());
  for (const auto& s : batch) out.push_back(&s);
  return out;
}

}  // namespace

void ModelDims::Validate() const {
  if (token_vocab < 1 || entity_vocab < 1 || hidden < 1 || projection < 1) {
    throw Error("model dims must all be >= 1");
  }
}

ModelParams ModelParams::Zeros(const ModelDims& dims) {
  dims.Validate();
  ModelParams p;
  p.dims = dims;
  const int h = dims.hidden;
  p.token_embeddings = Matrix::Zero(dims.token_vocab, h);
  p.enc_w = Matrix::Zero(h, h);
  p.enc_b = Vector::Zero(h);
  p.head_w1 = Matrix::Zero(h, h);
  p.head_b1 = Vector::Zero(h);
  p.head_w2 = Matrix::Zero(dims.entity_vocab, h);
  p.head_b2 = Vector::Zero(dims.entity_vocab);
  p.proj_w = Matrix::Zero(dims.projection, h);
  p.proj_b = Vector::Zero(dims.projection);
  return p;
}

std::array<std::span<double>, ModelParams::kNumTensors> ModelParams::Tensors() {
  return {Span(token_embeddings), Span(enc_w),   Span(enc_b),
          Span(head_w1),          Span(head_b1), Span(head_w2),
          Span(head_b2),          Span(proj_w),  Span(proj_b)};
}

std::array<std::span<const double>, ModelParams::kNumTensors>
ModelParams::Tensors() const {
  return {Span(token_embeddings), Span(enc_w),   Span(enc_b),
          Span(head_w1),          Span(head_b1), Span(head_w2),
          Span(head_b2),          Span(proj_w),  Span(proj_b)};
}

std::size_t ModelParams::ParameterCount() const {
  std::size_t n = 0;
  for (auto t : Tensors()) n += t.size();
  return n;
}

bool ModelParams::AllFinite() const {
  for (auto t : Tensors()) {
    for (double v : t) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

void ModelParams::SetZero() {
  for (auto t : Tensors()) std::fill(t.begin(), t.end(), 0.0);
}

void ModelParams::AddScaled(const ModelParams& other, double scale) {
  if (!(dims == other.dims)) throw Error("AddScaled: dims mismatch");
  auto mine = Tensors();
  auto theirs = other.Tensors();
  for (int i = 0; i < kNumTensors; ++i) {
    for (std::size_t k = 0; k < mine[i].size(); ++k) {
      mine[i][k] += scale * theirs[i][k];
    }
  }
}

bool ModelParams::operator==(const ModelParams& other) const {
  if (!(dims == other.dims) || !(lineage == other.lineage)) return false;
  auto a = Tensors();
  auto b = other.Tensors();
  for (int i = 0; i < kNumTensors; ++i) {
    if (a[i].size() != b[i].size() ||
        !std::equal(a[i].begin(), a[i].end(), b[i].begin())) {
      return false;
    }
  }
  return true;
}

double Gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
}

double GeluDerivative(double x) {
  const double th = std::tanh(kGeluC * (x + kGeluA * x * x * x));
  return 0.5 * (1.0 + th) +
         0.5 * x * (1.0 - th * th) * kGeluC * (1.0 + 3.0 * kGeluA * x * x);
}

ModelParams InitParams(const ModelDims& dims, std::uint64_t seed) {
  ModelParams p = ModelParams::Zeros(dims);
  p.lineage.init_seed = seed;
  if (dims.projection > dims.hidden) {
    std::clog << "warning: projection width " << dims.projection
              << " exceeds hidden width " << dims.hidden << "\n";
  }
  std::mt19937_64 rng(seed);
  auto fill = [&](Matrix& m, double bound) {
    std::uniform_real_distribution<double> u(-bound, bound);
    for (auto& v : Span(m)) v = u(rng);
  };
  const double kaiming = std::sqrt(6.0 / dims.hidden);
  fill(p.token_embeddings, 0.05);
  fill(p.enc_w, kaiming);
  fill(p.head_w1, kaiming);
  fill(p.head_w2, kaiming);
  fill(p.proj_w, kaiming);
  return p;
}

Vector Encode(const ModelParams& params, const MaskedSample& sample) {
  const MaskedSample* ptr = &sample;
  return EncodeBatch(params, std::span(&ptr, 1)).hidden.row(0).transpose();
}

Distribution Predict(const ModelParams& params, const MaskedSample& sample) {
  const MaskedSample* ptr = &sample;
  const Matrix probs = PredictBatch(params, std::span(&ptr, 1));
  return Distribution(probs.data(), probs.data() + probs.size());
}

Vector Project(const ModelParams& params, const MaskedSample& sample) {
  const MaskedSample* ptr = &sample;
  const EncoderOutput enc = EncodeBatch(params, std::span(&ptr, 1));
  return ProjectionForward(params, enc.hidden).z.row(0).transpose();
}

Matrix PredictBatch(const ModelParams& params,
                    std::span<const MaskedSample* const> samples) {
  if (samples.empty()) return Matrix(0, params.dims.entity_vocab);
  const EncoderOutput enc = EncodeBatch(params, samples);
  return HeadForward(params, enc.hidden).probs;
}

Distribution EntityRepresentation(const ModelParams& params,
                                  const Corpus& corpus, EntityId entity) {
  if (entity < 0 || entity >= corpus.num_entities() ||
      corpus.SamplesOf(entity).empty()) {
    throw Error("entity " + std::to_string(entity) + " has no samples");
  }
  std::vector<const MaskedSample*> batch;
  for (int idx : corpus.SamplesOf(entity)) batch.push_back(&corpus.sample(idx));
  const Matrix probs = PredictBatch(params, batch);
  const Vector mean = probs.colwise().mean().transpose();
  return Distribution(mean.data(), mean.data() + mean.size());
}

std::vector<Distribution> AllEntityRepresentations(const ModelParams& params,
                                                   const Corpus& corpus) {
  const int ve = params.dims.entity_vocab;
  if (corpus.num_entities() != ve) {
    throw Error("corpus entity count does not match model");
  }
  Matrix sums = Matrix::Zero(ve, ve);
  std::vector<const MaskedSample*> batch;
  for (int start = 0; start < corpus.size(); start += kRepresentationChunk) {
    const int end = std::min(corpus.size(), start + kRepresentationChunk);
    batch.clear();
    for (int i = start; i < end; ++i) batch.push_back(&corpus.sample(i));
    const Matrix probs = PredictBatch(params, batch);
    for (int i = start; i < end; ++i) {
      sums.row(corpus.sample(i).entity_id) += probs.row(i - start);
    }
  }
  std::vector<Distribution> reps(ve);
  for (EntityId e = 0; e < ve; ++e) {
    const double count = static_cast<double>(corpus.SamplesOf(e).size());
    reps[e].resize(ve);
    for (int j = 0; j < ve; ++j) reps[e][j] = sums(e, j) / count;
  }
  return reps;
}

LossResult LossAndGrad(const ModelParams& params,
                       std::span<const MaskedSample* const> batch,
                       const LossSpec& spec) {
  return Evaluate(params, batch, spec, /*want_grad=*/true);
}

LossResult LossAndGrad(const ModelParams& params,
                       std::span<const MaskedSample> batch,
                       const LossSpec& spec) {
  const auto ptrs = Pointers(batch);
  return Evaluate(params, ptrs, spec, /*want_grad=*/true);
}

double Loss(const ModelParams& params, std::span<const MaskedSample> batch,
            const LossSpec& spec) {
  const auto ptrs = Pointers(batch);
  return Evaluate(params, ptrs, spec, /*want_grad=*/false).loss;
}

}  // namespace probexpan
