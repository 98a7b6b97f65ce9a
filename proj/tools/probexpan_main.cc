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

// probexpan: command-line front end for training, selection, expansion and
// evaluation. Run `probexpan <subcommand> --help` for per-command flags.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "probexpan/binary_io.h"
#include "probexpan/config.h"
#include "probexpan/pipeline.h"
#include "probexpan/prediction_cache.h"
#include "probexpan/results_io.h"
#include "probexpan/synthgen.h"

namespace {

using namespace probexpan;

constexpr const char* kWorkdirEnv = "PROBEXPAN_WORKDIR";
constexpr int kUsageExit = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct ConfigFlags {
  std::string config_file;
  std::string preset;
  std::vector<std::string> sets;
  std::string corpus, vocab, seeds, truth, workdir;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string ablation;
};

struct ExpansionFlags {
  std::optional<int> target_size, w0, growth, step, tau_stage;
  std::optional<double> alpha;
};

void AddConfigFlags(CLI::App* cmd, ConfigFlags& f) {
  cmd->add_option("--config", f.config_file, "Flat key = value config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--preset", f.preset, "Hyper-parameter preset: synthetic|wiki|apr|se2");
  cmd->add_option("--set", f.sets, "Override a config key (key=value)");
  cmd->add_option("--corpus", f.corpus, "Corpus file");
  cmd->add_option("--vocab", f.vocab, "Entity vocabulary file");
  cmd->add_option("--seeds", f.seeds, "Seed query file");
  cmd->add_option("--truth", f.truth, "Ground truth file");
  cmd->add_option("--workdir", f.workdir,
                  std::string("Working directory (env ") + kWorkdirEnv + ")");
  cmd->add_option("--seed", f.seed, "Master RNG seed");
  cmd->add_option("--jobs", f.jobs, "Parallel training jobs");
  cmd->add_option("--ablation", f.ablation,
                  "none|no-cl|no-ensemble|no-cl-no-ensemble");
}

void AddExpansionFlags(CLI::App* cmd, ExpansionFlags& f) {
  cmd->add_option("--target-size", f.target_size, "Entities to expand per query");
  cmd->add_option("--w0", f.w0, "Initial window size");
  cmd->add_option("--growth", f.growth, "Window growth per step");
  cmd->add_option("--step", f.step, "Current-set size between window growths");
  cmd->add_option("--alpha", f.alpha, "Anchor scale (default V_e/10)");
  cmd->add_option("--tau-stage", f.tau_stage, "Anchor halving stage length");
}

RunConfig ResolveConfig(const ConfigFlags& f, const ExpansionFlags* e) {
  RunConfig c;
  if (!f.preset.empty()) ApplyPreset(f.preset, c);
  if (!f.config_file.empty()) LoadRunConfig(f.config_file, c);
  if (const char* env = std::getenv(kWorkdirEnv); env && *env) {
    c.paths.workdir = env;
  }
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw UsageError("--set expects key=value, got '" + kv + "'");
    }
    c.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!f.corpus.empty()) c.paths.corpus = f.corpus;
  if (!f.vocab.empty()) c.paths.vocab = f.vocab;
  if (!f.seeds.empty()) c.paths.seeds = f.seeds;
  if (!f.truth.empty()) c.paths.truth = f.truth;
  if (!f.workdir.empty()) c.paths.workdir = f.workdir;
  if (f.seed) c.seed = *f.seed;
  if (f.jobs) c.jobs = *f.jobs;
  if (!f.ablation.empty()) c.ablation = ParseAblation(f.ablation);
  if (e) {
    if (e->target_size) c.expansion.target_size = *e->target_size;
    if (e->w0) c.expansion.initial_window = *e->w0;
    if (e->growth) c.expansion.window_growth = *e->growth;
    if (e->step) c.expansion.growth_step = *e->step;
    if (e->tau_stage) c.expansion.stage_step = *e->tau_stage;
    if (e->alpha) c.expansion.alpha = *e->alpha;
  }
  c.Validate(true);
  return c;
}

std::filesystem::path DefaultCache(const Workdir& wd) {
  const auto phase4 = wd.CachePath(4);
  return std::filesystem::exists(phase4) ? phase4 : wd.CachePath(2);
}

void PrintScores(const std::vector<ModelScore>& scores) {
  std::printf("model  overall\n");
  for (const auto& s : scores) {
    std::printf("%-5d  %.9f\n", s.model, s.overall);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"probexpan: probabilistic entity set expansion"};
  app.require_subcommand(1);

  SynthSpec synth;
  std::string synth_out;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("--parents", synth.n_parents, "Parent classes")->required();
  synth_cmd->add_option("--siblings", synth.siblings_per_parent,
                        "Leaf classes per parent")->required();
  synth_cmd->add_option("--entities", synth.entities_per_class,
                        "Entities per leaf class")->required();
  synth_cmd->add_option("--sentences", synth.sentences_per_entity,
                        "Sentences per entity")->required();
  synth_cmd->add_option("--rho", synth.shared_context_ratio,
                        "Shared parent-context ratio")->capture_default_str();
  synth_cmd->add_option("--templates", synth.context_templates_per_class,
                        "Context templates per class")->capture_default_str();
  synth_cmd->add_option("--queries-per-class", synth.queries_per_class,
                        "Seed queries per leaf class")->capture_default_str();
  synth_cmd->add_option("--seed", synth.rng_seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--out", synth_out,
                        std::string("Output directory (default: workdir, env ") +
                            kWorkdirEnv + ")");

  ConfigFlags train_flags;
  int train_phase = 1;
  auto* train_cmd = app.add_subcommand("train", "Train the model ensemble");
  AddConfigFlags(train_cmd, train_flags);
  train_cmd->add_option("--phase", train_phase, "1 or 3")->capture_default_str()
      ->check(CLI::IsMember({1, 3}));

  ConfigFlags select_flags;
  int select_phase = 2;
  auto* select_cmd =
      app.add_subcommand("select", "Score models and build the prediction cache");
  AddConfigFlags(select_cmd, select_flags);
  select_cmd->add_option("--phase", select_phase, "2 or 4")->capture_default_str()
      ->check(CLI::IsMember({2, 4}));

  ConfigFlags expand_flags;
  ExpansionFlags expand_exp;
  std::string expand_cache, expand_out;
  auto* expand_cmd = app.add_subcommand("expand", "Expand every seed query");
  AddConfigFlags(expand_cmd, expand_flags);
  AddExpansionFlags(expand_cmd, expand_exp);
  expand_cmd->add_option("--cache", expand_cache, "Prediction cache file");
  expand_cmd->add_option("--output", expand_out, "Expansion output file");

  ConfigFlags rerank_flags;
  ExpansionFlags rerank_exp;
  std::string rerank_cache, rerank_in, rerank_out;
  auto* rerank_cmd = app.add_subcommand("rerank", "Re-rank expanded lists");
  AddConfigFlags(rerank_cmd, rerank_flags);
  AddExpansionFlags(rerank_cmd, rerank_exp);
  rerank_cmd->add_option("--cache", rerank_cache, "Prediction cache file");
  rerank_cmd->add_option("--input", rerank_in, "Unranked expansion file");
  rerank_cmd->add_option("--output", rerank_out, "Ranked expansion file");

  std::string eval_results, eval_truth, eval_vocab, eval_records;
  std::string eval_method = "probexpan";
  std::vector<int> eval_ks = {10, 20, 50};
  auto* eval_cmd = app.add_subcommand("eval", "Compute MAP@K for a results file");
  eval_cmd->add_option("--results", eval_results, "Expansion results file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--truth", eval_truth, "Ground truth file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--vocab", eval_vocab,
                       "Entity vocabulary; rejects unknown entities")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--ks", eval_ks, "Cutoffs")->capture_default_str()->delimiter(',');
  eval_cmd->add_option("--method", eval_method, "Method label")->capture_default_str();
  eval_cmd->add_option("--records", eval_records, "Write JSON-lines records here");

  ConfigFlags pipe_flags;
  ExpansionFlags pipe_exp;
  bool quiet = false;
  auto* pipe_cmd = app.add_subcommand("pipeline", "Run all four phases end to end");
  AddConfigFlags(pipe_cmd, pipe_flags);
  AddExpansionFlags(pipe_cmd, pipe_exp);
  pipe_cmd->add_flag("--quiet", quiet, "Suppress the training log");

  auto* cache_cmd = app.add_subcommand("cache", "Prediction cache utilities");
  cache_cmd->require_subcommand(1);
  std::string inspect_cache, inspect_vocab;
  std::vector<std::string> inspect_entities;
  int inspect_top = 10;
  auto* inspect_cmd =
      cache_cmd->add_subcommand("inspect", "Show an entity's top predictions");
  inspect_cmd->add_option("--cache", inspect_cache, "Cache file")
      ->required()
      ->check(CLI::ExistingFile);
  inspect_cmd->add_option("--vocab", inspect_vocab, "Entity vocabulary")
      ->check(CLI::ExistingFile);
  inspect_cmd->add_option("--entity", inspect_entities,
                          "Entity surface (with --vocab) or numeric id")
      ->required();
  inspect_cmd->add_option("--top", inspect_top, "Entries to show")->capture_default_str()
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) {
      if (synth_out.empty()) {
        const char* env = std::getenv(kWorkdirEnv);
        synth_out = env && *env ? env : RunPaths{}.workdir.string();
      }
      const SynthFiles files = WriteSynthetic(GenerateSynthetic(synth), synth_out);
      std::cout << files.corpus.string() << '\n'
                << files.vocab.string() << '\n'
                << files.seeds.string() << '\n'
                << files.truth.string() << '\n';
    } else if (*train_cmd) {
      const RunConfig c = ResolveConfig(train_flags, nullptr);
      const PipelineData data = LoadPipelineData(c);
      RunTrainStage(c, data, train_phase, std::cout);
    } else if (*select_cmd) {
      const RunConfig c = ResolveConfig(select_flags, nullptr);
      const PipelineData data = LoadPipelineData(c);
      PrintScores(RunSelectStage(c, data, select_phase));
    } else if (*expand_cmd) {
      const RunConfig c = ResolveConfig(expand_flags, &expand_exp);
      const Workdir wd(c.paths.workdir);
      const PipelineData data = LoadPipelineData(c);
      const auto cache = PredictionCache::Load(
          expand_cache.empty() ? DefaultCache(wd)
                             : std::filesystem::path(expand_cache));
      const auto out = expand_out.empty() ? wd.ExpansionPath("expanded")
                                          : std::filesystem::path(expand_out);
      SaveExpansionResults(out, ExpandQueries(c, data, cache));
      std::cout << out.string() << '\n';
    } else if (*rerank_cmd) {
      const RunConfig c = ResolveConfig(rerank_flags, &rerank_exp);
      const Workdir wd(c.paths.workdir);
      const EntityVocab vocab = EntityVocab::Load(c.paths.vocab);
      const auto cache = PredictionCache::Load(
          rerank_cache.empty() ? DefaultCache(wd)
                             : std::filesystem::path(rerank_cache));
      const auto in = rerank_in.empty() ? wd.ExpansionPath("expanded")
                                        : std::filesystem::path(rerank_in);
      const auto out = rerank_out.empty() ? wd.ExpansionPath("final")
                                          : std::filesystem::path(rerank_out);
      SaveExpansionResults(
          out, RerankQueries(c, vocab, cache, LoadExpansionResults(in)));
      std::cout << out.string() << '\n';
    } else if (*eval_cmd) {
      const auto results = LoadExpansionResults(eval_results);
      if (results.empty()) {
        throw UsageError(eval_results + ": no expansion records");
      }
      std::optional<EntityVocab> vocab;
      if (!eval_vocab.empty()) vocab = EntityVocab::Load(eval_vocab);
      const auto queries = BuildQueryResults(results, LoadGroundTruth(eval_truth),
                                             {}, vocab ? &*vocab : nullptr);
      const MethodReport reports[] = {Evaluate(eval_method, queries, eval_ks)};
      std::cout << FormatReportTable(reports);
      if (!eval_records.empty()) {
        WriteFileBytes(eval_records, FormatReportRecords(reports));
      }
    } else if (*pipe_cmd) {
      const RunConfig c = ResolveConfig(pipe_flags, &pipe_exp);
      std::ostringstream sink;
      const PipelineOutcome outcome = RunPipeline(c, quiet ? sink : std::cerr);
      const MethodReport reports[] = {outcome.report};
      std::cout << FormatReportTable(reports);
    } else if (*inspect_cmd) {
      const auto cache = PredictionCache::Load(inspect_cache);
      std::optional<EntityVocab> vocab;
      if (!inspect_vocab.empty()) vocab = EntityVocab::Load(inspect_vocab);
      if (vocab && vocab->size() != cache.num_entities()) {
        throw Error("vocabulary and cache sizes differ");
      }
      auto name = [&](EntityId e) {
        return vocab ? vocab->surface(e) : std::to_string(e);
      };
      for (const auto& raw : inspect_entities) {
        EntityId id;
        if (vocab) {
          id = vocab->IndexOf(raw);
        } else {
          try {
            std::size_t used = 0;
            id = std::stoi(raw, &used);
            if (used != raw.size()) throw std::invalid_argument(raw);
          } catch (const std::exception&) {
            throw UsageError("--entity '" + raw + "' needs --vocab or an id");
          }
          if (id < 0 || id >= cache.num_entities()) {
            throw Error("entity id " + raw + " is out of range");
          }
        }
        std::cout << name(id) << '\n';
        for (const auto& [e, p] : cache.Top(id, inspect_top)) {
          std::printf("  %-32s %.9f\n", name(e).c_str(), p);
        }
        std::fflush(stdout);
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
