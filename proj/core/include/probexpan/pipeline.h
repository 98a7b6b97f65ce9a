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

// Four-phase pipeline and its individually runnable stages.
//
//   1. train n_models on masked entity prediction
//   2. score, select top-k, build cache/phase2.bin
//      expand + rerank -> expansion/intermediate.txt
//   3. continue training each model with prediction + contrastive batches
//   4. reselect, build cache/phase4.bin
//      expand + rerank -> expansion/final.txt, evaluate -> report.txt
//
// Every stage reads its inputs from the workdir, so a later stage can be
// rerun on its own.

#ifndef PROBEXPAN_PIPELINE_H_
#define PROBEXPAN_PIPELINE_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "probexpan/config.h"
#include "probexpan/corpus.h"
#include "probexpan/ensemble.h"
#include "probexpan/eval.h"
#include "probexpan/queries.h"
#include "probexpan/results_io.h"

namespace probexpan {

class Workdir {
 public:
  explicit Workdir(std::filesystem::path root) : root_(std::move(root)) {}

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path ModelPath(int phase, int model) const;
  std::filesystem::path CachePath(int phase) const;
  std::filesystem::path SelectionPath(int phase) const;
  std::filesystem::path ExpansionPath(const std::string& name) const;
  std::filesystem::path TrainingLogPath(int phase) const;
  std::filesystem::path ReportPath() const;
  std::filesystem::path RecordsPath() const;
  std::filesystem::path ResolvedConfigPath() const;

 private:
  std::filesystem::path root_;
};

struct PipelineData {
  LoadedCorpus loaded;
  std::vector<SeedQuery> queries;
  GroundTruth truth;  // empty when no truth file is configured
};

PipelineData LoadPipelineData(const RunConfig& config);

// Trains all models of phase 1 or 3 (up to config.jobs in parallel) and
// writes their checkpoints. Phase 3 starts from the phase-1 checkpoints and
// mines contrastive targets from expansion/intermediate.txt.
void RunTrainStage(const RunConfig& config, const PipelineData& data,
                   int phase, std::ostream& log);

// Phase 2 selects among phase-1 models, phase 4 among phase-3 models.
std::vector<ModelScore> RunSelectStage(const RunConfig& config,
                                       const PipelineData& data, int phase);

// Expansion without re-ranking (rank and score left at 0).
std::vector<QueryExpansion> ExpandQueries(const RunConfig& config,
                                          const PipelineData& data,
                                          const PredictionCache& cache);

// Re-ranks unranked expansion records against the cache.
std::vector<QueryExpansion> RerankQueries(
    const RunConfig& config, const EntityVocab& vocab,
    const PredictionCache& cache, const std::vector<QueryExpansion>& unranked);

// Builds evaluation inputs: the query's own truth when present, otherwise
// the class members in `truth` minus the seeds. Throws Error for unknown
// classes, and for unknown entities when `vocab` is given.
std::vector<QueryResult> BuildQueryResults(
    const std::vector<QueryExpansion>& results, const GroundTruth& truth,
    const std::vector<SeedQuery>& queries, const EntityVocab* vocab);

struct PipelineOutcome {
  MethodReport report;
  std::vector<QueryExpansion> final_results;
};

// Runs phases 1-4 and writes every artifact under config.paths.workdir.
PipelineOutcome RunPipeline(const RunConfig& config, std::ostream& log);

}  // namespace probexpan

#endif  // PROBEXPAN_PIPELINE_H_
