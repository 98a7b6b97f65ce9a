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

#include "probexpan/queries.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace probexpan {
namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

bool SkipLine(std::string_view line) {
  const std::string norm = NormalizeText(line);
  return norm.empty() || norm.front() == '#';
}

std::string JoinEntities(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back('|');
    out += items[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> SplitEntityList(std::string_view field, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= field.size()) {
    std::size_t end = field.find(sep, start);
    if (end == std::string_view::npos) end = field.size();
    std::string item = NormalizeText(field.substr(start, end - start));
    if (!item.empty()) out.push_back(std::move(item));
    start = end + 1;
  }
  return out;
}

std::vector<SeedQuery> ParseSeedQueries(std::istream& in,
                                        const std::string& source) {
  std::vector<SeedQuery> queries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (SkipLine(line)) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() < 2 || fields.size() > 3) {
      throw ParseError(source, line_no,
                       "expected <class>\\t<seeds>[\\t<truth>]");
    }
    SeedQuery q;
    q.class_name = NormalizeText(fields[0]);
    q.seeds = SplitEntityList(fields[1]);
    if (fields.size() == 3) q.truth = SplitEntityList(fields[2]);
    if (q.class_name.empty()) throw ParseError(source, line_no, "empty class");
    if (q.seeds.empty()) throw ParseError(source, line_no, "no seeds");
    queries.push_back(std::move(q));
  }
  return queries;
}

std::vector<SeedQuery> LoadSeedQueries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open seed file " + path.string());
  return ParseSeedQueries(in, path.string());
}

void WriteSeedQueries(std::ostream& out,
                      const std::vector<SeedQuery>& queries) {
  for (const auto& q : queries) {
    out << q.class_name << '\t' << JoinEntities(q.seeds);
    if (!q.truth.empty()) out << '\t' << JoinEntities(q.truth);
    out << '\n';
  }
}

GroundTruth ParseGroundTruth(std::istream& in, const std::string& source) {
  GroundTruth truth;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (SkipLine(line)) continue;
    const auto fields = SplitTabs(line);
    if (fields.size() != 2) {
      throw ParseError(source, line_no, "expected <class>\\t<members>");
    }
    std::string cls = NormalizeText(fields[0]);
    auto members = SplitEntityList(fields[1]);
    if (cls.empty() || members.empty()) {
      throw ParseError(source, line_no, "empty class or member list");
    }
    if (!truth.emplace(cls, std::move(members)).second) {
      throw ParseError(source, line_no, "duplicate class " + cls);
    }
  }
  return truth;
}

GroundTruth LoadGroundTruth(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open ground-truth file " + path.string());
  return ParseGroundTruth(in, path.string());
}

void WriteGroundTruth(std::ostream& out, const GroundTruth& truth) {
  for (const auto& [cls, members] : truth) {
    out << cls << '\t' << JoinEntities(members) << '\n';
  }
}

std::vector<EntityId> ResolveSeeds(const SeedQuery& query,
                                   const EntityVocab& vocab) {
  std::vector<EntityId> ids;
  for (const auto& s : query.seeds) {
    auto id = vocab.Find(s);
    if (!id) {
      throw Error("query '" + query.class_name + "': unknown seed entity '" +
                  s + "'");
    }
    if (std::find(ids.begin(), ids.end(), *id) == ids.end()) ids.push_back(*id);
  }
  return ids;
}

std::vector<ClassSeeds> GroupSeedsByClass(const std::vector<SeedQuery>& queries,
                                          const EntityVocab& vocab) {
  std::vector<ClassSeeds> classes;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& q : queries) {
    auto [it, inserted] = index.emplace(q.class_name, classes.size());
    if (inserted) classes.push_back({q.class_name, {}});
    auto& seeds = classes[it->second].seeds;
    for (EntityId id : ResolveSeeds(q, vocab)) {
      if (std::find(seeds.begin(), seeds.end(), id) == seeds.end()) {
        seeds.push_back(id);
      }
    }
  }
  return classes;
}

}  // namespace probexpan
