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

// Run configuration. The file format is flat `section.key = value` lines;
// `#` starts a comment. Every key can also be set from the command line.

#ifndef PROBEXPAN_CONFIG_H_
#define PROBEXPAN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "probexpan/corpus.h"
#include "probexpan/expansion.h"
#include "probexpan/model.h"
#include "probexpan/prediction_cache.h"
#include "probexpan/training.h"

namespace probexpan {

enum class Ablation {
  kNone,
  kNoContrastive,             // phase 3 runs prediction batches only
  kNoEnsemble,                // top_k forced to 1
  kNoContrastiveNoEnsemble,
};

Ablation ParseAblation(std::string_view name);
std::string_view AblationName(Ablation ablation);

struct RunPaths {
  std::filesystem::path corpus;
  std::filesystem::path vocab;
  std::filesystem::path seeds;
  std::filesystem::path truth;  // optional
  std::filesystem::path workdir = "probexpan_work";
};

struct RunConfig {
  RunPaths paths;
  ModelDims dims;  // hidden/projection; vocab sizes come from the corpus
  TrainingConfig training;
  ExpansionConfig expansion;
  std::vector<int> eval_ks = {10, 20, 50};
  std::uint64_t seed = 1;
  int jobs = 1;
  Ablation ablation = Ablation::kNone;
  std::string method = "probexpan";
  UnknownEntityPolicy unknown_entities = UnknownEntityPolicy::kError;
  CacheWriteOptions cache;

  // Throws Error for unknown keys or unparsable values.
  void Set(std::string_view key, std::string_view value);
  void Validate(bool check_files) const;
  // Resolved `key = value` lines; parseable by LoadRunConfig.
  std::string Dump() const;
  // Plan with the ablation applied.
  PhasePlan EffectivePlan() const;
};

// Table-5 style presets: "synthetic", "wiki", "apr", "se2".
void ApplyPreset(std::string_view name, RunConfig& config);

void ParseRunConfig(std::istream& in, const std::string& source,
                    RunConfig& config);
void LoadRunConfig(const std::filesystem::path& path, RunConfig& config);

}  // namespace probexpan

#endif  // PROBEXPAN_CONFIG_H_
