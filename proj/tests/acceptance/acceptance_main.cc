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


// Acceptance harness. Prints one PASS/FAIL line per criterion, followed by
// the measured quantities, and exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "probexpan/checkpoint.h"
#include "probexpan/ensemble.h"
#include "probexpan/eval.h"
#include "probexpan/expansion.h"
#include "probexpan/losses.h"
#include "probexpan/model.h"
#include "probexpan/pipeline.h"
#include "probexpan/synthgen.h"
#include "test_util.h"

namespace probexpan {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

Matrix RandomUnitRows(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix z(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) z(i, j) = g(rng);
    z.row(i).normalize();
  }
  return z;
}

// Plain InfoNCE over pairs (2m, 2m+1), written without the library.
double InfoNce(const Matrix& z, double t) {
  double loss = 0.0;
  for (int i = 0; i < z.rows(); ++i) {
    const int j = i ^ 1;
    const double pos = std::exp(z.row(i).dot(z.row(j)) / t);
    double neg = 0.0;
    for (int k = 0; k < z.rows(); ++k) {
      if (k != i && k != j) neg += std::exp(z.row(i).dot(z.row(k)) / t);
    }
    loss -= std::log(pos / (pos + neg));
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Property criteria.

Outcome GradientCheck() {
  const auto start = Clock::now();
  const ModelDims dims{7, 5, 8, 4};
  std::mt19937_64 rng(20260101);
  double worst[2] = {0.0, 0.0};
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams params = testing::RandomParams(dims, rng);
    const auto batch = testing::RandomSamples(dims, 4, rng);
    for (int mode = 0; mode < 2; ++mode) {
      LossSpec spec;
      spec.mode = mode ? LossMode::kContrastive : LossMode::kPrediction;
      worst[mode] = std::max(
          worst[mode], testing::MaxGradientRelativeError(params, batch, spec));
    }
  }
  const double elapsed = Seconds(start);
  return {worst[0] < 1e-4 && worst[1] < 1e-4 && elapsed < 10.0,
          Format("max rel err prediction=%.3e contrastive=%.3e, %.2fs",
                 worst[0], worst[1], elapsed)};
}

Outcome ContrastiveClosedForms() {
  double worst_identical = 0.0;
  for (int n : {2, 4, 8}) {
    const Matrix z = Matrix::Ones(2 * n, 3) / std::sqrt(3.0);
    ContrastiveConfig cfg;
    const double expected = 2.0 * n * std::log(2.0 * n - 1.0);
    worst_identical = std::max(
        worst_identical, std::abs(ContrastiveLoss(z, cfg).loss - expected));
  }
  std::mt19937_64 rng(77);
  ContrastiveConfig cfg;
  cfg.class_prior = 0.0;
  cfg.concentration = 0.0;
  double worst_infonce = 0.0;
  int clamped = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    const Matrix z = RandomUnitRows(2 * n, 4, rng);
    const ContrastiveResult r = ContrastiveLoss(z, cfg);
    for (double neg : r.negative_terms) {
      if (neg <= std::exp(-1.0 / cfg.temperature)) ++clamped;
    }
    worst_infonce =
        std::max(worst_infonce, std::abs(r.loss - InfoNce(z, cfg.temperature)));
  }
  return {worst_identical < 1e-9 && worst_infonce < 1e-9 && clamped == 0,
          Format("identical |err|=%.2e, InfoNCE |err|=%.2e over 50 batches "
                 "(clamp active %d times)",
                 worst_identical, worst_infonce, clamped)};
}

Outcome ClampInvariant() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> tau(0.0, 0.9), beta(0.0, 4.0);
  std::uniform_int_distribution<int> pairs(2, 16), width(2, 8);
  int violations = 0, at_floor = 0, terms = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    ContrastiveConfig cfg;
    cfg.class_prior = tau(rng);
    cfg.concentration = beta(rng);
    const double floor = std::exp(-1.0 / cfg.temperature);
    Matrix z = RandomUnitRows(2 * pairs(rng), width(rng), rng);
    if (trial % 4 == 0) {
      for (int m = 0; m + 1 < z.rows(); m += 2) z.row(m + 1) = z.row(m);
    }
    for (double neg : ContrastiveLoss(z, cfg).negative_terms) {
      ++terms;
      if (neg < floor) ++violations;
      if (neg == floor) ++at_floor;
    }
  }
  return {violations == 0,
          Format("%d violations among %d terms (%d exactly at the floor)",
                 violations, terms, at_floor)};
}

Outcome WindowSearchOracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(404);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int ve = std::uniform_int_distribution<int>(2, 10)(rng);
    const PredictionCache cache = testing::RandomCache(ve, rng);
    std::vector<EntityId> ids(ve);
    for (int i = 0; i < ve; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    const int n_cur =
        std::uniform_int_distribution<int>(1, std::min(4, ve - 1))(rng);
    const std::vector<EntityId> current(ids.begin(), ids.begin() + n_cur);
    ExpansionConfig cfg;
    cfg.initial_window = std::uniform_int_distribution<int>(1, 5)(rng);
    cfg.window_growth = 0;
    cfg.stage_step = std::uniform_int_distribution<int>(1, 4)(rng);
    if (trial % 3) {
      cfg.alpha = std::uniform_real_distribution<double>(0.1, 30.0)(rng);
    }
    std::vector<Distribution> rows;
    for (EntityId e = 0; e < ve; ++e) {
      rows.emplace_back(cache.row(e).begin(), cache.row(e).end());
    }
    const auto candidates =
        CandidateList(SetRepresentation(cache, current), current);
    if (WindowSearch(candidates, current, cache, cfg) !=
        testing::BruteForceWindowSearch(candidates, current, rows, cfg)) {
      ++mismatches;
    }
  }
  const double elapsed = Seconds(start);
  return {mismatches == 0 && elapsed < 5.0,
          Format("%d mismatches in 200 instances, %.3fs", mismatches, elapsed)};
}

Outcome LabelSmoothingCases() {
  const std::vector<EntityId> y0{0};
  const std::vector<Distribution> uniform{{0.5, 0.5}};
  const std::vector<Distribution> skewed{{0.7, 0.3}};
  const long double oracle =
      -(0.9L * std::log(0.7L) + 0.1L * std::log(0.3L));
  const double e1 = std::abs(LabelSmoothingLoss(uniform, y0, 0.0) - std::log(2.0));
  double e2 = 0.0;
  for (double eta : {0.0, 0.1, 0.37, 0.9}) {
    e2 = std::max(e2, std::abs(LabelSmoothingLoss(uniform, y0, eta) -
                               std::log(2.0)));
  }
  const double e3 = static_cast<double>(
      std::abs(LabelSmoothingLoss(skewed, y0, 0.1) - oracle));
  return {e1 < 1e-9 && e2 < 1e-9 && e3 < 1e-9,
          Format("|err| ln2=%.1e, eta-invariant=%.1e, derived=%.1e "
                 "(oracle %.12Lf)",
                 e1, e2, e3, oracle)};
}

Outcome KlAndScoring() {
  const std::vector<double> p{0.3, 0.7}, point{1.0, 0.0}, half{0.5, 0.5};
  const double self = KlDivergence(p, p);
  const double ln2 = KlDivergence(point, half);
  const double geo = ScoreModelOverall(std::vector<double>{-0.1, -0.4});
  const std::vector<std::vector<Distribution>> reps{
      {{0.6, 0.3, 0.1}, {0.3, 0.6, 0.1}, {0.1, 0.1, 0.8}},
      {{0.2, 0.5, 0.3}, {0.2, 0.5, 0.3}, {0.1, 0.1, 0.8}},
      {{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}}};
  const std::vector<std::vector<EntityId>> classes{{0, 1}};
  const auto scores = ScoreModels(reps, classes);
  const auto best = SelectTopK(scores, 1).front();
  const bool pass = std::abs(self) < 1e-9 && std::abs(ln2 - std::log(2.0)) < 1e-9 &&
                    geo == -0.2 && scores[1].per_class[0] == 0.0 &&
                    best.model == 1;
  return {pass, Format("KL(p,p)=%.1e, KL([1,0],[.5,.5])-ln2=%.1e, geo=%.17g, "
                       "identical-seed model class score=%g, selected=%d",
                       self, ln2 - std::log(2.0), geo, scores[1].per_class[0],
                       best.model)};
}

Outcome StaircaseAndAggregation() {
  ExpansionConfig cfg;
  cfg.initial_window = 5;
  cfg.window_growth = 2;
  cfg.growth_step = 10;
  const int w[] = {WindowSize(cfg, 3), WindowSize(cfg, 9), WindowSize(cfg, 10),
                   WindowSize(cfg, 23)};
  const double a = AggregationScore(1, 1);
  const double b = AggregationScore(4, 9);
  const double c = AggregationScore(2, 8);
  const bool pass = w[0] == 5 && w[1] == 5 && w[2] == 7 && w[3] == 9 &&
                    a == 1.0 && b == 1.0 / 6.0 && c == 0.25;
  return {pass, Format("windows %d,%d,%d,%d; scores %.17g, %.17g, %.17g",
                       w[0], w[1], w[2], w[3], a, b, c)};
}

Outcome MapCases() {
  const QueryResult perfect{"a", {"a", "c"}, {"a", "c"}};
  const QueryResult miss{"b", {"x", "y", "z"}, {"a"}};
  const QueryResult mixed{"c", {"a", "b", "c"}, {"a", "c"}};
  const double p = AveragePrecisionAtK(perfect, 2);
  const double m = AveragePrecisionAtK(miss, 3);
  const double x = AveragePrecisionAtK(mixed, 3);
  const std::vector<QueryResult> all{perfect, miss, mixed};
  const double map = MapAtK(all, 3);
  const double mean = (AveragePrecisionAtK(perfect, 3) + AveragePrecisionAtK(miss, 3) +
                       AveragePrecisionAtK(mixed, 3)) / 3.0;
  const bool pass = std::abs(p - 1.0) < 1e-12 && std::abs(m) < 1e-12 &&
                    std::abs(x - 5.0 / 6.0) < 1e-12 && std::abs(map - mean) < 1e-12;
  return {pass, Format("AP %.12f, %.12f, %.12f; MAP %.12f vs mean %.12f", p, m,
                       x, map, mean)};
}

// ---------------------------------------------------------------------------
// End-to-end criteria on the default synthetic spec.

constexpr int kMasterSeeds = 5;

struct EndToEnd {
  explicit EndToEnd(const std::filesystem::path& root) : root(root) {}

  SynthFiles Data(int seed, double rho) {
    const auto dir = root / Format("data_rho%.2f_seed%d", rho, seed);
    SynthSpec spec;
    spec.shared_context_ratio = rho;
    spec.rng_seed = static_cast<std::uint64_t>(seed);
    return WriteSynthetic(GenerateSynthetic(spec), dir);
  }

  RunConfig Config(const SynthFiles& files, int seed, Ablation ablation,
                   const std::string& workdir) {
    RunConfig c;
    c.paths.corpus = files.corpus;
    c.paths.vocab = files.vocab;
    c.paths.seeds = files.seeds;
    c.paths.truth = files.truth;
    c.paths.workdir = root / workdir;
    c.seed = static_cast<std::uint64_t>(seed);
    c.ablation = ablation;
    return c;
  }

  MethodReport Run(const RunConfig& c) {
    std::ostringstream log;
    return RunPipeline(c, log).report;
  }

  std::filesystem::path root;
  std::vector<RunConfig> full_runs;  // rho = 0.5, one per master seed
  std::vector<double> seed_seconds;
};

// Wins / ties / losses of `a` against `b`, per master seed.
std::string PairedComparison(const std::vector<double>& a,
                             const std::vector<double>& b) {
  int wins = 0, ties = 0, losses = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) {
      ++wins;
    } else if (a[i] == b[i]) {
      ++ties;
    } else {
      ++losses;
    }
  }
  return Format("%d/%d/%d", wins, ties, losses);
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string Join(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : " ") + Format("%.4f", x);
  return out;
}

Outcome AblationOrdering(EndToEnd& e2e) {
  std::vector<double> full10, full50, nocl50, noen50;
  for (int seed = 1; seed <= kMasterSeeds; ++seed) {
    const auto start = Clock::now();
    const SynthFiles files = e2e.Data(seed, 0.5);
    const RunConfig full =
        e2e.Config(files, seed, Ablation::kNone, Format("full_%d", seed));
    const MethodReport f = e2e.Run(full);
    e2e.full_runs.push_back(full);
    const MethodReport n = e2e.Run(
        e2e.Config(files, seed, Ablation::kNoContrastive, Format("nocl_%d", seed)));
    const MethodReport s = e2e.Run(
        e2e.Config(files, seed, Ablation::kNoEnsemble, Format("noen_%d", seed)));
    full10.push_back(f.map[0]);
    full50.push_back(f.map[2]);
    nocl50.push_back(n.map[2]);
    noen50.push_back(s.map[2]);
    e2e.seed_seconds.push_back(Seconds(start));
    std::cout << "  [10] seed " << seed << ": full MAP@10 "
              << Format("%.4f", f.map[0]) << " MAP@50 "
              << Format("%.4f", f.map[2]) << ", no-cl MAP@50 "
              << Format("%.4f", n.map[2]) << ", top_k=1 MAP@50 "
              << Format("%.4f", s.map[2]) << ", "
              << Format("%.1fs", e2e.seed_seconds.back()) << std::endl;
  }
  const double slowest =
      *std::max_element(e2e.seed_seconds.begin(), e2e.seed_seconds.end());
  const bool pass = Mean(full10) >= 0.85 && Mean(full50) >= Mean(nocl50) &&
                    Mean(full50) >= Mean(noen50) && slowest < 15 * 60;
  return {pass,
          Format("mean MAP@10 full=%.4f; mean MAP@50 full=%.6f no-cl=%.6f "
                 "top_k=1=%.6f; full vs no-cl W/T/L %s, vs top_k=1 %s; "
                 "slowest seed %.0fs",
                 Mean(full10), Mean(full50), Mean(nocl50), Mean(noen50),
                 PairedComparison(full50, nocl50).c_str(),
                 PairedComparison(full50, noen50).c_str(), slowest)};
}

Outcome NoiseMonotonicity(EndToEnd& e2e) {
  if (e2e.full_runs.empty()) return {false, "no trained models available"};
  const double sigmas[] = {0.01, 0.1, 1.0};
  int monotone = 0;
  std::string detail;
  for (const RunConfig& config : e2e.full_runs) {
    const PipelineData data = LoadPipelineData(config);
    std::vector<std::vector<EntityId>> classes;
    for (const auto& c : GroupSeedsByClass(data.queries, data.loaded.entities)) {
      if (c.seeds.size() >= 2) classes.push_back(c.seeds);
    }
    const ModelParams trained =
        LoadCheckpoint(Workdir(config.paths.workdir).ModelPath(3, 0));
    auto score = [&](const ModelParams& p) {
      const std::vector<std::vector<Distribution>> reps{
          AllEntityRepresentations(p, data.loaded.corpus)};
      return ScoreModels(reps, classes).front().overall;
    };
    std::vector<double> s{score(trained)};
    for (int i = 0; i < 3; ++i) {
      std::mt19937_64 rng(DeriveSeed(config.seed, 7000 + i));
      std::normal_distribution<double> noise(0.0, sigmas[i]);
      ModelParams noisy = trained;
      for (auto tensor : noisy.Tensors()) {
        for (double& v : tensor) v += noise(rng);
      }
      s.push_back(score(noisy));
    }
    const bool ok = s[0] > s[1] && s[1] > s[2] && s[2] > s[3];
    monotone += ok;
    detail += Format("%s[seed %d: %.3g > %.3g > %.3g > %.3g]%s",
                     detail.empty() ? "" : " ", static_cast<int>(config.seed),
                     s[0], s[1], s[2], s[3], ok ? "" : " (not monotone)");
  }
  return {monotone >= 4, Format("%d/%d seeds monotone ", monotone,
                                static_cast<int>(e2e.full_runs.size())) +
                             detail};
}

Outcome Separable(EndToEnd& e2e) {
  int perfect_seeds = 0;
  std::vector<double> worst;
  for (int seed = 1; seed <= kMasterSeeds; ++seed) {
    const SynthFiles files = e2e.Data(seed, 0.0);
    const MethodReport r = e2e.Run(
        e2e.Config(files, seed, Ablation::kNone, Format("rho0_%d", seed)));
    double low = 1.0;
    for (const auto& q : r.query_ap) low = std::min(low, q[0]);
    worst.push_back(low);
    perfect_seeds += low == 1.0;
  }
  return {perfect_seeds == kMasterSeeds,
          Format("lowest per-class AP@10 by seed: %s", Join(worst).c_str())};
}

Outcome Determinism(EndToEnd& e2e) {
  if (e2e.full_runs.empty()) return {false, "no reference run available"};
  RunConfig again = e2e.full_runs.front();
  const Workdir first(again.paths.workdir);
  again.paths.workdir = e2e.root / "rerun";
  e2e.Run(again);
  const Workdir second(again.paths.workdir);
  const bool report = testing::ReadText(first.ReportPath()) ==
                      testing::ReadText(second.ReportPath());
  const bool records = testing::ReadText(first.RecordsPath()) ==
                       testing::ReadText(second.RecordsPath());
  return {report && records,
          Format("report.txt %s, report.jsonl %s",
                 report ? "identical" : "differs",
                 records ? "identical" : "differs")};
}

Outcome Guard(const std::function<Outcome()>& check) {
  try {
    return check();
  } catch (const std::exception& e) {
    return {false, std::string("error: ") + e.what()};
  }
}

}  // namespace
}  // namespace probexpan

int main() {
  using namespace probexpan;
  testing::TempDir dir("acceptance");
  EndToEnd e2e(dir.path());

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
    Outcome outcome;
  };
  std::vector<Criterion> criteria{
      {1, "gradient check", GradientCheck, {}},
      {2, "contrastive closed forms", ContrastiveClosedForms, {}},
      {3, "clamp invariant", ClampInvariant, {}},
      {4, "window search oracle", WindowSearchOracle, {}},
      {5, "label smoothing cases", LabelSmoothingCases, {}},
      {6, "KL and model scoring", KlAndScoring, {}},
      {7, "noise degrades model score", [&] { return NoiseMonotonicity(e2e); }, {}},
      {8, "window staircase and aggregation", StaircaseAndAggregation, {}},
      {9, "MAP@K cases", MapCases, {}},
      {10, "end-to-end ablation", [&] { return AblationOrdering(e2e); }, {}},
      {11, "separable corpus", [&] { return Separable(e2e); }, {}},
      {12, "determinism", [&] { return Determinism(e2e); }, {}},
  };
  // Criterion 7 reuses the models trained for criterion 10.
  const int run_order[] = {1, 2, 3, 4, 5, 6, 8, 9, 10, 7, 11, 12};
  for (int id : run_order) {
    Criterion& c = criteria[id - 1];
    c.outcome = Guard(c.check);
  }
  int failed = 0;
  for (const Criterion& c : criteria) {
    std::cout << (c.outcome.pass ? "PASS" : "FAIL") << " criterion " << c.id
              << " (" << c.name << "): " << c.outcome.detail << "\n";
    failed += !c.outcome.pass;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size()
            << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
