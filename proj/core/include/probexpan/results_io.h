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

// Expansion result file. Tab-separated records:
//
//   # probexpan expansion v1
//   query   <class>   <seed>|<seed>|...
//   entity  <surface> <order> <rank> <score>
//   ...
//   end
//
// Entity lines appear in output order. Unranked expansions (before re-ranking)
// carry rank 0 and score 0 and are listed in expansion order.

#ifndef PROBEXPAN_RESULTS_IO_H_
#define PROBEXPAN_RESULTS_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace probexpan {

struct ExpandedEntry {
  std::string surface;
  int order = 0;
  int rank = 0;
  double score = 0.0;

  bool operator==(const ExpandedEntry&) const = default;
};

struct QueryExpansion {
  std::string class_name;
  std::vector<std::string> seeds;
  std::vector<ExpandedEntry> entries;

  bool operator==(const QueryExpansion&) const = default;
};

void WriteExpansionResults(std::ostream& out,
                           const std::vector<QueryExpansion>& results);
void SaveExpansionResults(const std::filesystem::path& path,
                          const std::vector<QueryExpansion>& results);

std::vector<QueryExpansion> ParseExpansionResults(std::istream& in,
                                                  const std::string& source);
std::vector<QueryExpansion> LoadExpansionResults(
    const std::filesystem::path& path);

}  // namespace probexpan

#endif  // PROBEXPAN_RESULTS_IO_H_
