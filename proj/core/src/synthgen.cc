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

#include "probexpan/synthgen.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "probexpan/binary_io.h"

namespace probexpan {
namespace {

constexpr int kPoolSize = 16;

const std::vector<std::string>& FunctionWords() {
  static const std::vector<std::string> words = {
      "the",  "of",   "and",  "a",    "in",    "to",   "is",    "was",
      "for",  "on",   "with", "as",   "by",    "at",   "from",  "that",
      "its",  "were", "this", "also", "which", "has",  "after", "most"};
  return words;
}

// A slot is either a fixed pool token or (empty) a random function word.
struct Template {
  std::vector<std::string> left;
  std::vector<std::string> right;
};

Template MakeTemplate(const std::vector<std::string>& pool, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(2, 4);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::bernoulli_distribution pooled(0.6);
  Template t;
  t.left.resize(len(rng));
  t.right.resize(len(rng));
  for (auto* side : {&t.left, &t.right}) {
    for (auto& slot : *side) {
      if (pooled(rng)) slot = pool[pick(rng)];
    }
    // Each side carries at least one pool token.
    (*side)[pick(rng) % side->size()] = pool[pick(rng)];
  }
  return t;
}

std::string Render(const Template& t, const std::string& entity,
                   std::mt19937_64& rng) {
  const auto& words = FunctionWords();
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  std::string out;
  auto emit = [&](const std::string& tok) {
    if (!out.empty()) out.push_back(' ');
    out += tok;
  };
  for (const auto& slot : t.left) emit(slot.empty() ? words[pick(rng)] : slot);
  emit("<e>" + entity + "</e>");
  for (const auto& slot : t.right) emit(slot.empty() ? words[pick(rng)] : slot);
  return out;
}

std::vector<std::string> MakePool(const std::string& prefix) {
  std::vector<std::string> pool;
  for (int k = 0; k < kPoolSize; ++k) pool.push_back(prefix + std::to_string(k));
  return pool;
}

}  // namespace

void SynthSpec::Validate() const {
  if (n_parents < 1 || siblings_per_parent < 1 || entities_per_class < 1 ||
      sentences_per_entity < 1 || context_templates_per_class < 1 ||
      queries_per_class < 1) {
    throw Error("synth spec: all counts must be >= 1");
  }
  if (!(shared_context_ratio >= 0.0 && shared_context_ratio <= 1.0)) {
    throw Error("synth spec: shared_context_ratio must be in [0, 1]");
  }
  if (entities_per_class < 4) {
    throw Error(
        "synth spec: entities_per_class must be >= 4 (3 seeds + 1 target)");
  }
}

SynthCorpus GenerateSynthetic(const SynthSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(spec.rng_seed);
  SynthCorpus out;

  struct LeafClass {
    std::string name;
    int parent;
    std::vector<Template> templates;
    std::vector<EntityId> members;
  };
  std::vector<std::vector<Template>> parent_templates(spec.n_parents);
  std::vector<LeafClass> classes;

  for (int p = 0; p < spec.n_parents; ++p) {
    const auto parent_pool = MakePool("par" + std::to_string(p) + "_w");
    for (int k = 0; k < spec.context_templates_per_class; ++k) {
      parent_templates[p].push_back(MakeTemplate(parent_pool, rng));
    }
    for (int s = 0; s < spec.siblings_per_parent; ++s) {
      LeafClass leaf;
      leaf.name = "class_p" + std::to_string(p) + "_s" + std::to_string(s);
      leaf.parent = p;
      const auto pool = MakePool("c" + std::to_string(p) + "s" +
                                 std::to_string(s) + "_w");
      for (int k = 0; k < spec.context_templates_per_class; ++k) {
        leaf.templates.push_back(MakeTemplate(pool, rng));
      }
      for (int k = 0; k < spec.entities_per_class; ++k) {
        leaf.members.push_back(static_cast<EntityId>(out.entities.size()));
        out.entities.push_back("ent_p" + std::to_string(p) + "_s" +
                               std::to_string(s) + "_" + std::to_string(k));
      }
      classes.push_back(std::move(leaf));
    }
  }

  const int shared = static_cast<int>(
      std::lround(spec.shared_context_ratio * spec.sentences_per_entity));
  out.shared_sentence_counts.assign(out.entities.size(), shared);
  for (const auto& leaf : classes) {
    const auto& shared_templates = parent_templates[leaf.parent];
    std::uniform_int_distribution<std::size_t> pick_shared(
        0, shared_templates.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_own(
        0, leaf.templates.size() - 1);
    for (EntityId e : leaf.members) {
      for (int i = 0; i < spec.sentences_per_entity; ++i) {
        const Template& t = i < shared ? shared_templates[pick_shared(rng)]
                                       : leaf.templates[pick_own(rng)];
        out.sentences.push_back(Render(t, out.entities[e], rng));
      }
    }
  }
  std::shuffle(out.sentences.begin(), out.sentences.end(), rng);

  for (const auto& leaf : classes) {
    std::vector<std::string> members;
    for (EntityId e : leaf.members) members.push_back(out.entities[e]);
    for (int q = 0; q < spec.queries_per_class; ++q) {
      std::vector<EntityId> order = leaf.members;
      std::shuffle(order.begin(), order.end(), rng);
      order.resize(3);
      SeedQuery query;
      query.class_name = leaf.name;
      for (EntityId e : order) query.seeds.push_back(out.entities[e]);
      for (const auto& m : members) {
        if (std::find(query.seeds.begin(), query.seeds.end(), m) ==
            query.seeds.end()) {
          query.truth.push_back(m);
        }
      }
      out.queries.push_back(std::move(query));
    }
    out.truth.emplace(leaf.name, std::move(members));
  }
  return out;
}

SynthFiles WriteSynthetic(const SynthCorpus& data,
                          const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  SynthFiles files{out_dir / "corpus.txt", out_dir / "entities.txt",
                   out_dir / "seeds.tsv", out_dir / "truth.tsv"};
  auto join_lines = [](const std::vector<std::string>& lines) {
    std::string s;
    for (const auto& l : lines) {
      s += l;
      s.push_back('\n');
    }
    return s;
  };
  WriteFileBytes(files.corpus, join_lines(data.sentences));
  WriteFileBytes(files.vocab, join_lines(data.entities));
  std::ostringstream seeds;
  WriteSeedQueries(seeds, data.queries);
  WriteFileBytes(files.seeds, seeds.str());
  std::ostringstream truth;
  WriteGroundTruth(truth, data.truth);
  WriteFileBytes(files.truth, truth.str());
  return files;
}

}  // namespace probexpan
