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

#include "probexpan/config.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <istream>
#include <sstream>

namespace probexpan {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T ParseNumber(std::string_view key, std::string_view raw) {
  const std::string text = Trim(raw);
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error("config: bad value '" + text + "' for " + std::string(key));
  }
  return v;
}

bool ParseBool(std::string_view key, std::string_view raw) {
  const std::string text = Trim(raw);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error("config: bad boolean '" + text + "' for " + std::string(key));
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Field {
  std::string_view key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T, typename Access>
Field NumberField(std::string_view key, Access access) {
  return Field{
      key,
      [key, access](RunConfig& c, std::string_view v) {
        access(c) = ParseNumber<T>(key, v);
      },
      [access](const RunConfig& c) {
        const T v = access(const_cast<RunConfig&>(c));
        if constexpr (std::is_floating_point_v<T>) {
          return FormatDouble(v);
        } else {
          return std::to_string(v);
        }
      }};
}

template <typename Access>
Field PathField(std::string_view key, Access access) {
  return Field{
      key,
      [access](RunConfig& c, std::string_view v) { access(c) = Trim(v); },
      [access](const RunConfig& c) {
        return access(const_cast<RunConfig&>(c)).string();
      }};
}

std::vector<int> ParseKs(std::string_view raw) {
  std::vector<int> ks;
  std::string text = Trim(raw);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    ks.push_back(ParseNumber<int>("eval.ks", item));
  }
  if (ks.empty()) throw Error("config: eval.ks is empty");
  return ks;
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back(PathField(
        "paths.corpus",
        [](RunConfig& c) -> auto& { return c.paths.corpus; }));
    f.push_back(PathField(
        "paths.vocab",
        [](RunConfig& c) -> auto& { return c.paths.vocab; }));
    f.push_back(PathField(
        "paths.seeds",
        [](RunConfig& c) -> auto& { return c.paths.seeds; }));
    f.push_back(PathField(
        "paths.truth",
        [](RunConfig& c) -> auto& { return c.paths.truth; }));
    f.push_back(PathField(
        "paths.workdir",
        [](RunConfig& c) -> auto& { return c.paths.workdir; }));
    f.push_back(Field{
        "corpus.unknown_entities",
        [](RunConfig& c, std::string_view v) {
          const std::string t = Trim(v);
          if (t == "error") {
            c.unknown_entities = UnknownEntityPolicy::kError;
          } else if (t == "skip") {
            c.unknown_entities = UnknownEntityPolicy::kSkip;
          } else {
            throw Error("config: corpus.unknown_entities must be error|skip");
          }
        },
        [](const RunConfig& c) -> std::string {
          return c.unknown_entities == UnknownEntityPolicy::kSkip ? "skip"
                                                                  : "error";
        }});

    f.push_back(NumberField<int>(

        "model.hidden",

        [](RunConfig& c) -> auto& { return c.dims.hidden; }));
    f.push_back(NumberField<int>(
        "model.projection",
        [](RunConfig& c) -> auto& { return c.dims.projection; }));

    f.push_back(NumberField<double>(

        "smoothing.eta",

        [](RunConfig& c) -> auto& { return c.training.smoothing.eta; }));

    f.push_back(NumberField<double>(

        "contrastive.tau_plus",

        [](RunConfig& c) -> auto& { return c.training.contrastive.class_prior; }));
    f.push_back(NumberField<double>(
        "contrastive.beta",
        [](RunConfig& c) -> auto& { return c.training.contrastive.concentration; }));
    f.push_back(NumberField<double>(
        "contrastive.temperature",
        [](RunConfig& c) -> auto& { return c.training.contrastive.temperature; }));
    f.push_back(NumberField<int>(
        "contrastive.thr_pos",
        [](RunConfig& c) -> auto& { return c.training.contrastive.thr_pos; }));
    f.push_back(NumberField<int>(
        "contrastive.lower_neg",
        [](RunConfig& c) -> auto& { return c.training.contrastive.lower_neg; }));
    f.push_back(NumberField<int>(
        "contrastive.upper_neg",
        [](RunConfig& c) -> auto& { return c.training.contrastive.upper_neg; }));

    f.push_back(NumberField<int>(

        "plan.n_models",

        [](RunConfig& c) -> auto& { return c.training.plan.n_models; }));
    f.push_back(NumberField<int>(
        "plan.top_k",
        [](RunConfig& c) -> auto& { return c.training.plan.top_k; }));
    f.push_back(NumberField<int>(
        "plan.epochs_phase1",
        [](RunConfig& c) -> auto& { return c.training.plan.epochs_phase1; }));
    f.push_back(NumberField<int>(
        "plan.epochs_phase3",
        [](RunConfig& c) -> auto& { return c.training.plan.epochs_phase3; }));
    f.push_back(NumberField<int>(
        "plan.cl_rounds",
        [](RunConfig& c) -> auto& { return c.training.plan.cl_rounds; }));
    f.push_back(NumberField<double>(
        "plan.lr_pred",
        [](RunConfig& c) -> auto& { return c.training.plan.lr_pred; }));
    f.push_back(NumberField<double>(
        "plan.lr_cl",
        [](RunConfig& c) -> auto& { return c.training.plan.lr_cl; }));
    f.push_back(NumberField<int>(
        "plan.batch_size",
        [](RunConfig& c) -> auto& { return c.training.plan.batch_size; }));
    f.push_back(NumberField<int>(
        "plan.cl_pairs",
        [](RunConfig& c) -> auto& { return c.training.plan.cl_pairs; }));
    f.push_back(NumberField<double>(
        "plan.pos_fraction",
        [](RunConfig& c) -> auto& { return c.training.plan.pos_fraction; }));
    f.push_back(Field{
        "plan.contrastive",
        [](RunConfig& c, std::string_view v) {
          c.training.plan.contrastive = ParseBool("plan.contrastive", v);
        },
        [](const RunConfig& c) -> std::string {
          return c.training.plan.contrastive ? "true" : "false";
        }});

    f.push_back(NumberField<double>(

        "optimizer.beta1",

        [](RunConfig& c) -> auto& { return c.training.optimizer.beta1; }));
    f.push_back(NumberField<double>(
        "optimizer.beta2",
        [](RunConfig& c) -> auto& { return c.training.optimizer.beta2; }));
    f.push_back(NumberField<double>(
        "optimizer.epsilon",
        [](RunConfig& c) -> auto& { return c.training.optimizer.epsilon; }));
    f.push_back(NumberField<double>(
        "optimizer.weight_decay",
        [](RunConfig& c) -> auto& { return c.training.optimizer.weight_decay; }));

    f.push_back(NumberField<int>(

        "expansion.w0",

        [](RunConfig& c) -> auto& { return c.expansion.initial_window; }));
    f.push_back(NumberField<int>(
        "expansion.growth",
        [](RunConfig& c) -> auto& { return c.expansion.window_growth; }));
    f.push_back(NumberField<int>(
        "expansion.step",
        [](RunConfig& c) -> auto& { return c.expansion.growth_step; }));
    f.push_back(NumberField<int>(
        "expansion.tau_stage",
        [](RunConfig& c) -> auto& { return c.expansion.stage_step; }));
    f.push_back(NumberField<int>(
        "expansion.target_size",
        [](RunConfig& c) -> auto& { return c.expansion.target_size; }));
    f.push_back(NumberField<double>(
        "expansion.sharpness",
        [](RunConfig& c) -> auto& { return c.expansion.anchor_sharpness; }));
    f.push_back(Field{
        "expansion.alpha",
        [](RunConfig& c, std::string_view v) {
          if (Trim(v) == "auto") {
            c.expansion.alpha.reset();
          } else {
            c.expansion.alpha = ParseNumber<double>("expansion.alpha", v);
          }
        },
        [](const RunConfig& c) -> std::string {
          return c.expansion.alpha ? FormatDouble(*c.expansion.alpha) : "auto";
        }});

    f.push_back(Field{
        "eval.ks",
        [](RunConfig& c, std::string_view v) { c.eval_ks = ParseKs(v); },
        [](const RunConfig& c) {
          std::string out;
          for (std::size_t i = 0; i < c.eval_ks.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(c.eval_ks[i]);
          }
          return out;
        }});

    f.push_back(NumberField<std::uint64_t>(

        "seed",

        [](RunConfig& c) -> auto& { return c.seed; }));
    f.push_back(NumberField<int>(
        "jobs",
        [](RunConfig& c) -> auto& { return c.jobs; }));
    f.push_back(Field{
        "ablation",
        [](RunConfig& c, std::string_view v) {
          c.ablation = ParseAblation(Trim(v));
        },
        [](const RunConfig& c) { return std::string(AblationName(c.ablation)); }});
    f.push_back(Field{
        "method",
        [](RunConfig& c, std::string_view v) {
          c.method = Trim(v);
          if (c.method.empty()) throw Error("config: method name is empty");
        },
        [](const RunConfig& c) { return c.method; }});

    f.push_back(NumberField<int>(

        "cache.dense_limit",

        [](RunConfig& c) -> auto& { return c.cache.dense_limit; }));
    f.push_back(NumberField<int>(
        "cache.sparse_top_m",
        [](RunConfig& c) -> auto& { return c.cache.sparse_top_m; }));
    return f;
  }();
  return fields;
}

}  // namespace

Ablation ParseAblation(std::string_view name) {
  if (name == "none") return Ablation::kNone;
  if (name == "no-cl") return Ablation::kNoContrastive;
  if (name == "no-ensemble") return Ablation::kNoEnsemble;
  if (name == "no-cl-no-ensemble") return Ablation::kNoContrastiveNoEnsemble;
  throw Error("unknown ablation '" + std::string(name) +
              "' (expected none|no-cl|no-ensemble|no-cl-no-ensemble)");
}

std::string_view AblationName(Ablation ablation) {
  switch (ablation) {
    case Ablation::kNone: return "none";
    case Ablation::kNoContrastive: return "no-cl";
    case Ablation::kNoEnsemble: return "no-ensemble";
    case Ablation::kNoContrastiveNoEnsemble: return "no-cl-no-ensemble";
  }
  return "none";
}

void RunConfig::Set(std::string_view key, std::string_view value) {
  const std::string k = Trim(key);
  if (k == "preset") {
    ApplyPreset(Trim(value), *this);
    return;
  }
  for (const auto& f : Fields()) {
    if (f.key == k) {
      f.set(*this, value);
      return;
    }
  }
  throw Error("config: unknown key '" + k + "'");
}

void RunConfig::Validate(bool check_files) const {
  if (dims.hidden < 1 || dims.projection < 1) {
    throw Error("config: model.hidden and model.projection must be >= 1");
  }
  training.smoothing.Validate();
  training.contrastive.Validate();
  if (training.contrastive.thr_pos > training.contrastive.lower_neg) {
    std::clog << "warning: contrastive.thr_pos (" << training.contrastive.thr_pos
              << ") exceeds contrastive.lower_neg ("
              << training.contrastive.lower_neg << ")\n";
  }
  EffectivePlan().Validate();
  expansion.Validate();
  if (eval_ks.empty()) throw Error("config: eval.ks is empty");
  for (int k : eval_ks) {
    if (k < 1) throw Error("config: eval.ks entries must be >= 1");
  }
  if (jobs < 1) throw Error("config: jobs must be >= 1");
  if (cache.sparse_top_m < 1) throw Error("config: cache.sparse_top_m must be >= 1");
  const std::pair<const char*, const std::filesystem::path*> required[] = {
      {"paths.corpus", &paths.corpus},
      {"paths.vocab", &paths.vocab},
      {"paths.seeds", &paths.seeds}};
  for (const auto& [name, path] : required) {
    if (path->empty()) throw Error(std::string("config: ") + name + " is not set");
    if (check_files && !std::filesystem::exists(*path)) {
      throw Error(std::string("config: ") + name + " does not exist: " +
                  path->string());
    }
  }
  if (check_files && !paths.truth.empty() &&
      !std::filesystem::exists(paths.truth)) {
    throw Error("config: paths.truth does not exist: " + paths.truth.string());
  }
}

std::string RunConfig::Dump() const {
  std::string out;
  for (const auto& f : Fields()) {
    out += std::string(f.key) + " = " + f.get(*this) + "\n";
  }
  return out;
}

PhasePlan RunConfig::EffectivePlan() const {
  PhasePlan plan = training.plan;
  if (ablation == Ablation::kNoContrastive ||
      ablation == Ablation::kNoContrastiveNoEnsemble) {
    plan.contrastive = false;
  }
  if (ablation == Ablation::kNoEnsemble ||
      ablation == Ablation::kNoContrastiveNoEnsemble) {
    plan.top_k = 1;
  }
  return plan;
}

void ApplyPreset(std::string_view name, RunConfig& config) {
  struct Preset {
    std::string_view name;
    double eta, lr_pred, lr_cl;
    int thr_pos, lower_neg, upper_neg;
    double tau_plus, beta;
  };
  static constexpr Preset kPresets[] = {
      {"synthetic", 0.1, 5e-3, 1e-3, 20, 40, 80, 0.05, 1.0},
      {"wiki", 0.075, 1e-5, 1.5e-5, 12, 170, 200, 0.05, 1.0},
      {"apr", 0.1, 1e-5, 1.5e-5, 10, 175, 200, 0.1, 1.0},
      {"se2", 0.15, 2.5e-6, 3.5e-6, 5, 160, 180, 0.01, 2.0},
  };
  for (const auto& p : kPresets) {
    if (p.name != name) continue;
    config.training.smoothing.eta = p.eta;
    config.training.plan.lr_pred = p.lr_pred;
    config.training.plan.lr_cl = p.lr_cl;
    config.training.contrastive.thr_pos = p.thr_pos;
    config.training.contrastive.lower_neg = p.lower_neg;
    config.training.contrastive.upper_neg = p.upper_neg;
    config.training.contrastive.class_prior = p.tau_plus;
    config.training.contrastive.concentration = p.beta;
    return;
  }
  throw Error("unknown preset '" + std::string(name) +
              "' (expected synthetic|wiki|apr|se2)");
}

void ParseRunConfig(std::istream& in, const std::string& source,
                    RunConfig& config) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ParseError(source, line_no, "expected key = value");
    }
    try {
      config.Set(t.substr(0, eq), t.substr(eq + 1));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
}

void LoadRunConfig(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  ParseRunConfig(in, path.string(), config);
}

}  // namespace probexpan
