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

#ifndef PROBEXPAN_TESTS_TEST_UTIL_H_
#define PROBEXPAN_TESTS_TEST_UTIL_H_

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "probexpan/common.h"
#include "probexpan/corpus.h"
#include "probexpan/expansion.h"
#include "probexpan/model.h"
#include "probexpan/prediction_cache.h"

namespace probexpan::testing {

// A fresh, empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

void WriteText(const std::filesystem::path& path, const std::string& text);
std::string ReadText(const std::filesystem::path& path);

// Parameters drawn uniformly from [-scale, scale], biases included.
ModelParams RandomParams(const ModelDims& dims, std::mt19937_64& rng,
                         double scale = 0.5);

// Samples with 2..6 random non-mask tokens plus one mask, random labels.
std::vector<MaskedSample> RandomSamples(const ModelDims& dims, int count,
                                        std::mt19937_64& rng);

// A random probability vector of length n with strictly positive entries.
Distribution RandomDistribution(int n, std::mt19937_64& rng);

// A corpus where every entity has `per_entity` random samples.
Corpus RandomCorpus(const ModelDims& dims, int per_entity, std::mt19937_64& rng);

// Largest relative error between the analytic gradient and central finite
// differences over every parameter:
//   |analytic - numeric| / max(|analytic|, |numeric|, floor)
double MaxGradientRelativeError(const ModelParams& params,
                                std::span<const MaskedSample> batch,
                                const LossSpec& spec, double step = 1e-5,
                                double floor = 1e-6);

// Window search written from scratch: raw anchor masses, a local softmax and
// a local floored KL, scored for every windowed candidate.
EntityId BruteForceWindowSearch(const std::vector<EntityId>& candidates,
                                const std::vector<EntityId>& current,
                                const std::vector<Distribution>& rows,
                                const ExpansionConfig& cfg);

// A random prediction cache over `n` entities.
PredictionCache RandomCache(int n, std::mt19937_64& rng);

}  // namespace probexpan::testing

#endif  // PROBEXPAN_TESTS_TEST_UTIL_H_
