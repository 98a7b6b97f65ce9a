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

#include "probexpan/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "probexpan/binary_io.h"
#include "probexpan/checkpoint.h"
#include "probexpan/expansion.h"
#include "probexpan/model.h"
#include "probexpan/training.h"

namespace probexpan {
namespace {

constexpr std::uint64_t kPhase3Stream = 3;

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ModelDims DimsFor(const RunConfig& config, const PipelineData& data) {
  ModelDims dims = config.dims;
  dims.token_vocab = data.loaded.tokens.size();
  dims.entity_vocab = data.loaded.entities.size();
  return dims;
}

TrainingConfig EffectiveTraining(const RunConfig& config) {
  TrainingConfig t = config.training;
  t.plan = config.EffectivePlan();
  return t;
}

SeedLineage LineageFor(const RunConfig& config, int model) {
  SeedLineage l;
  l.master_seed = config.seed;
  l.model_index = static_cast<std::uint64_t>(model);
  l.init_seed = DeriveSeed(config.seed, static_cast<std::uint64_t>(model));
  return l;
}

// Runs task(i) for i in [0, n) on up to `jobs` threads. The first exception
// (lowest index) is rethrown after all workers finish.
void ParallelFor(int n, int jobs, const std::function<void(int)>& task) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, std::max(n, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<ExpansionTarget> LoadTargets(const Workdir& wd,
                                         const PipelineData& data) {
  const auto path = wd.ExpansionPath("intermediate");
  const auto results = LoadExpansionResults(path);
  const EntityVocab& vocab = data.loaded.entities;
  std::vector<ExpansionTarget> targets;
  for (const auto& q : results) {
    ExpansionTarget t;
    for (const auto& s : q.seeds) t.seeds.push_back(vocab.IndexOf(s));
    for (const auto& e : q.entries) t.ranked.push_back(vocab.IndexOf(e.surface));
    targets.push_back(std::move(t));
  }
  if (targets.empty()) throw Error(path.string() + ": no expansion records");
  return targets;
}

std::vector<QueryExpansion> ExpandAndRerank(const RunConfig& config,
                                            const PipelineData& data,
                                            const PredictionCache& cache) {
  return RerankQueries(config, data.loaded.entities, cache,
                       ExpandQueries(config, data, cache));
}

template <typename F>
auto Stage(const std::string& name, const std::vector<std::string>& trail,
           F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const std::exception& e) {
    std::string msg = "stage '" + name + "' failed: " + e.what();
    if (!trail.empty()) {
      msg += "\nartifacts written before failure:";
      for (const auto& a : trail) msg += "\n  " + a;
    }
    throw Error(msg);
  }
}

}  // namespace

std::filesystem::path Workdir::ModelPath(int phase, int model) const {
  return root_ / "models" / ("phase" + std::to_string(phase)) /
         ("model_" + std::to_string(model) + ".ckpt");
}

std::filesystem::path Workdir::CachePath(int phase) const {
  return root_ / "cache" / ("phase" + std::to_string(phase) + ".bin");
}

std::filesystem::path Workdir::SelectionPath(int phase) const {
  return root_ / "cache" / ("phase" + std::to_string(phase) + ".selection.txt");
}

std::filesystem::path Workdir::ExpansionPath(const std::string& name) const {
  return root_ / "expansion" / (name + ".txt");
}

std::filesystem::path Workdir::TrainingLogPath(int phase) const {
  return root_ / "logs" / ("train_phase" + std::to_string(phase) + ".log");
}

std::filesystem::path Workdir::ReportPath() const { return root_ / "report.txt"; }

std::filesystem::path Workdir::RecordsPath() const {
  return root_ / "report.jsonl";
}

std::filesystem::path Workdir::ResolvedConfigPath() const {
  return root_ / "config.resolved.txt";
}

PipelineData LoadPipelineData(const RunConfig& config) {
  LoadOptions options;
  options.unknown_entities = config.unknown_entities;
  options.warnings = &std::cerr;
  PipelineData data{
      LoadCorpus(config.paths.corpus, config.paths.vocab, options), {}, {}};
  data.queries = LoadSeedQueries(config.paths.seeds);
  if (data.queries.empty()) {
    throw Error(config.paths.seeds.string() + ": no seed queries");
  }
  for (const auto& q : data.queries) ResolveSeeds(q, data.loaded.entities);
  if (!config.paths.truth.empty()) {
    data.truth = LoadGroundTruth(config.paths.truth);
  }
  return data;
}

void RunTrainStage(const RunConfig& config, const PipelineData& data,
                   int phase, std::ostream& log) {
  if (phase != 1 && phase != 3) {
    throw Error("train: phase must be 1 or 3, got " + std::to_string(phase));
  }
  const Workdir wd(config.paths.workdir);
  const TrainingConfig training = EffectiveTraining(config);
  const ModelDims dims = DimsFor(config, data);
  const int n = training.plan.n_models;
  std::vector<ExpansionTarget> targets;
  if (phase == 3 && training.plan.contrastive) targets = LoadTargets(wd, data);

  std::vector<std::ostringstream> logs(n);
  ParallelFor(n, config.jobs, [&](int m) {
    auto record = [&](const EpochRecord& r) { WriteEpochRecord(logs[m], r); };
    ModelParams params;
    if (phase == 1) {
      params = TrainPhase1(data.loaded.corpus, dims, training,
                           LineageFor(config, m), record);
    } else {
      ModelParams start = LoadCheckpoint(wd.ModelPath(1, m));
      if (!(start.dims == dims)) {
        throw Error(wd.ModelPath(1, m).string() +
                    ": dimensions do not match the corpus");
      }
      const std::uint64_t seed =
          DeriveSeed(start.lineage.init_seed, kPhase3Stream);
      params = TrainPhase3(std::move(start), data.loaded.corpus, targets,
                           training, seed, record);
    }
    SaveCheckpoint(wd.ModelPath(phase, m), params);
  });

  std::string all;
  for (auto& l : logs) all += l.str();
  WriteFileBytes(wd.TrainingLogPath(phase), all);
  log << all;
}

std::vector<ModelScore> RunSelectStage(const RunConfig& config,
                                       const PipelineData& data, int phase) {
  if (phase != 2 && phase != 4) {
    throw Error("select: phase must be 2 or 4, got " + std::to_string(phase));
  }
  const Workdir wd(config.paths.workdir);
  const PhasePlan plan = config.EffectivePlan();
  const int model_phase = phase - 1;

  std::vector<ClassSeeds> classes;
  for (auto& c : GroupSeedsByClass(data.queries, data.loaded.entities)) {
    if (c.seeds.size() >= 2) classes.push_back(std::move(c));
  }
  if (classes.empty()) {
    throw Error("select: model scoring needs a class with at least 2 seeds");
  }
  std::vector<std::vector<EntityId>> class_seeds;
  for (const auto& c : classes) class_seeds.push_back(c.seeds);

  std::vector<std::vector<Distribution>> reps(plan.n_models);
  std::vector<std::uint64_t> checksums(plan.n_models);
  ParallelFor(plan.n_models, config.jobs, [&](int m) {
    const ModelParams params = LoadCheckpoint(wd.ModelPath(model_phase, m));
    if (params.dims.entity_vocab != data.loaded.entities.size()) {
      throw Error(wd.ModelPath(model_phase, m).string() +
                  ": entity vocabulary size does not match");
    }
    checksums[m] = CheckpointChecksum(params);
    reps[m] = AllEntityRepresentations(params, data.loaded.corpus);
  });

  const auto scores = ScoreModels(reps, class_seeds);
  const auto top = SelectTopK(scores, plan.top_k);
  std::vector<const std::vector<Distribution>*> chosen;
  std::vector<std::uint64_t> provenance;
  for (const auto& s : top) {
    chosen.push_back(&reps[s.model]);
    provenance.push_back(checksums[s.model]);
  }
  const PredictionCache cache = BuildPredictionCache(chosen, provenance);
  cache.Save(wd.CachePath(phase), config.cache);

  std::ostringstream sel;
  sel << "# model\toverall\tselected";
  for (const auto& c : classes) sel << '\t' << c.class_name;
  sel << '\n';
  for (const auto& s : scores) {
    const bool picked = std::any_of(top.begin(), top.end(), [&](const auto& t) {
      return t.model == s.model;
    });
    sel << s.model << '\t' << Num(s.overall) << '\t' << (picked ? 1 : 0);
    for (double c : s.per_class) sel << '\t' << Num(c);
    sel << '\n';
  }
  WriteFileBytes(wd.SelectionPath(phase), sel.str());
  return scores;
}

std::vector<QueryExpansion> ExpandQueries(const RunConfig& config,
                                          const PipelineData& data,
                                          const PredictionCache& cache) {
  const EntityVocab& vocab = data.loaded.entities;
  if (cache.num_entities() != vocab.size()) {
    throw Error("expand: cache covers " + std::to_string(cache.num_entities()) +
                " entities but the vocabulary has " +
                std::to_string(vocab.size()));
  }
  std::vector<QueryExpansion> out;
  for (const auto& q : data.queries) {
    const auto seeds = ResolveSeeds(q, vocab);
    const ExpansionState state = Expand(seeds, cache, config.expansion);
    QueryExpansion r;
    r.class_name = q.class_name;
    for (EntityId s : state.seeds()) r.seeds.push_back(vocab.surface(s));
    int order = 0;
    for (EntityId e : state.expanded()) {
      r.entries.push_back(ExpandedEntry{vocab.surface(e), ++order, 0, 0.0});
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<QueryExpansion> RerankQueries(
    const RunConfig& config, const EntityVocab& vocab,
    const PredictionCache& cache,
    const std::vector<QueryExpansion>& unranked) {
  std::vector<QueryExpansion> out;
  for (const auto& q : unranked) {
    std::vector<ExpandedEntry> by_order = q.entries;
    std::stable_sort(by_order.begin(), by_order.end(),
                     [](const ExpandedEntry& a, const ExpandedEntry& b) {
                       return a.order < b.order;
                     });
    ExpansionState state;
    for (const auto& s : q.seeds) state.current.push_back(vocab.IndexOf(s));
    state.num_seeds = static_cast<int>(state.current.size());
    for (const auto& e : by_order) state.current.push_back(vocab.IndexOf(e.surface));

    QueryExpansion r;
    r.class_name = q.class_name;
    r.seeds = q.seeds;
    for (const auto& ranked : Rerank(state, cache, config.expansion)) {
      r.entries.push_back(ExpandedEntry{by_order[ranked.order - 1].surface,
                                        by_order[ranked.order - 1].order,
                                        ranked.rank, ranked.score});
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<QueryResult> BuildQueryResults(
    const std::vector<QueryExpansion>& results, const GroundTruth& truth,
    const std::vector<SeedQuery>& queries, const EntityVocab* vocab) {
  std::unordered_map<std::string, int> seen;
  std::vector<QueryResult> out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const QueryExpansion& q = results[i];
    QueryResult r;
    const int dup = ++seen[q.class_name];
    r.name = dup == 1 ? q.class_name : q.class_name + "#" + std::to_string(dup);

    const std::vector<std::string>* members = nullptr;
    if (auto it = truth.find(q.class_name); it != truth.end()) {
      members = &it->second;
    } else if (i < queries.size() && queries[i].class_name == q.class_name &&
               !queries[i].truth.empty()) {
      members = &queries[i].truth;
    }
    if (!members) {
      throw Error("evaluate: no ground truth for class '" + q.class_name + "'");
    }
    r.truth.insert(members->begin(), members->end());
    for (const auto& s : q.seeds) r.truth.erase(s);
    if (r.truth.empty()) {
      throw Error("evaluate: ground truth for '" + q.class_name +
                  "' is empty once seeds are removed");
    }
    for (const auto& e : q.entries) {
      if (vocab && !vocab->Find(e.surface)) {
        throw Error("evaluate: unknown entity '" + e.surface + "' in results");
      }
      r.ranked.push_back(e.surface);
    }
    out.push_back(std::move(r));
  }
  return out;
}

PipelineOutcome RunPipeline(const RunConfig& config, std::ostream& log) {
  config.Validate(true);
  const Workdir wd(config.paths.workdir);
  std::filesystem::create_directories(wd.root());
  WriteFileBytes(wd.ResolvedConfigPath(), config.Dump());
  std::vector<std::string> trail{wd.ResolvedConfigPath().string()};
  const PhasePlan plan = config.EffectivePlan();

  const PipelineData data =
      Stage("load", trail, [&] { return LoadPipelineData(config); });
  log << "loaded " << data.loaded.corpus.size() << " samples, "
      << data.loaded.entities.size() << " entities, "
      << data.queries.size() << " queries\n";

  auto note = [&](const std::filesystem::path& p) {
    trail.push_back(p.string());
  };

  Stage("train phase 1", trail, [&] { RunTrainStage(config, data, 1, log); });
  for (int m = 0; m < plan.n_models; ++m) note(wd.ModelPath(1, m));

  Stage("select phase 2", trail, [&] { RunSelectStage(config, data, 2); });
  note(wd.CachePath(2));
  int cache_phase = 2;

  for (int round = 0; round < plan.cl_rounds; ++round) {
    Stage("intermediate expansion", trail, [&] {
      const auto cache = PredictionCache::Load(wd.CachePath(cache_phase));
      SaveExpansionResults(wd.ExpansionPath("intermediate"),
                           ExpandAndRerank(config, data, cache));
    });
    note(wd.ExpansionPath("intermediate"));

    Stage("train phase 3", trail, [&] { RunTrainStage(config, data, 3, log); });
    for (int m = 0; m < plan.n_models; ++m) note(wd.ModelPath(3, m));

    Stage("select phase 4", trail, [&] { RunSelectStage(config, data, 4); });
    note(wd.CachePath(4));
    cache_phase = 4;
  }

  PipelineOutcome outcome;
  outcome.final_results = Stage("final expansion", trail, [&] {
    const auto cache = PredictionCache::Load(wd.CachePath(cache_phase));
    auto results = ExpandAndRerank(config, data, cache);
    SaveExpansionResults(wd.ExpansionPath("final"), results);
    return results;
  });
  note(wd.ExpansionPath("final"));

  outcome.report = Stage("eval", trail, [&] {
    const auto results = BuildQueryResults(outcome.final_results, data.truth,
                                           data.queries, &data.loaded.entities);
    MethodReport report = Evaluate(config.method, results, config.eval_ks);
    const MethodReport reports[] = {report};
    WriteFileBytes(wd.ReportPath(), FormatReportTable(reports));
    WriteFileBytes(wd.RecordsPath(), FormatReportRecords(reports));
    return report;
  });
  return outcome;
}

}  // namespace probexpan
