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

// Seed query and ground-truth files.
//
// Both are tab-separated text; `#` starts a comment line. Entity lists are
// separated by `|`.
//
//   seed file:          <class> \t <seed>|<seed>|... [\t <truth>|<truth>|...]
//   ground-truth file:  <class> \t <member>|<member>|...

#ifndef PROBEXPAN_QUERIES_H_
#define PROBEXPAN_QUERIES_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "probexpan/common.h"
#include "probexpan/corpus.h"

namespace probexpan {

struct SeedQuery {
  std::string class_name;
  std::vector<std::string> seeds;
  // Empty when the file carries no ground truth for this query.
  std::vector<std::string> truth;

  bool operator==(const SeedQuery&) const = default;
};

std::vector<SeedQuery> ParseSeedQueries(std::istream& in,
                                        const std::string& source);
std::vector<SeedQuery> LoadSeedQueries(const std::filesystem::path& path);
void WriteSeedQueries(std::ostream& out, const std::vector<SeedQuery>& queries);

// Class name -> full member list.
using GroundTruth = std::map<std::string, std::vector<std::string>>;

GroundTruth ParseGroundTruth(std::istream& in, const std::string& source);
GroundTruth LoadGroundTruth(const std::filesystem::path& path);
void WriteGroundTruth(std::ostream& out, const GroundTruth& truth);

// Seed surfaces resolved against the vocabulary; throws on unknown surfaces.
std::vector<EntityId> ResolveSeeds(const SeedQuery& query,
                                   const EntityVocab& vocab);

// Distinct class names in first-appearance order with the union of their
// queries' seeds.
struct ClassSeeds {
  std::string class_name;
  std::vector<EntityId> seeds;
};
std::vector<ClassSeeds> GroupSeedsByClass(const std::vector<SeedQuery>& queries,
                                          const EntityVocab& vocab);

// Splits on `sep`, normalizing and dropping empty fields.
std::vector<std::string> SplitEntityList(std::string_view field, char sep = '|');

}  // namespace probexpan

#endif  // PROBEXPAN_QUERIES_H_
