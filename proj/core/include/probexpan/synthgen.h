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

// Synthetic corpora with a two-level class hierarchy.
//
// Every leaf class (parent p, sibling s) owns a pool of filler tokens and a
// set of context templates drawn from it. Each parent owns its own pool and
// templates, shared by all of its siblings. A fraction `shared_context_ratio`
// of each entity's sentences is rendered from parent templates, so siblings
// are indistinguishable on those sentences and act as hard negatives for one
// another.

#ifndef PROBEXPAN_SYNTHGEN_H_
#define PROBEXPAN_SYNTHGEN_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "probexpan/queries.h"

namespace probexpan {

struct SynthSpec {
  int n_parents = 3;
  int siblings_per_parent = 2;
  int entities_per_class = 40;
  int sentences_per_entity = 30;
  double shared_context_ratio = 0.5;
  int context_templates_per_class = 8;
  int queries_per_class = 1;
  std::uint64_t rng_seed = 7;

  void Validate() const;
};

struct SynthCorpus {
  // Corpus lines in the `<e>surface</e>` format, without trailing newlines.
  std::vector<std::string> sentences;
  std::vector<std::string> entities;
  std::vector<SeedQuery> queries;
  GroundTruth truth;
  // Per entity (vocabulary order): number of parent-template sentences.
  std::vector<int> shared_sentence_counts;
};

SynthCorpus GenerateSynthetic(const SynthSpec& spec);

struct SynthFiles {
  std::filesystem::path corpus;
  std::filesystem::path vocab;
  std::filesystem::path seeds;
  std::filesystem::path truth;
};

// Writes corpus.txt, entities.txt, seeds.tsv and truth.tsv into `out_dir`.
SynthFiles WriteSynthetic(const SynthCorpus& data,
                          const std::filesystem::path& out_dir);

}  // namespace probexpan

#endif  // PROBEXPAN_SYNTHGEN_H_
