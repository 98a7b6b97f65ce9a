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

#include "probexpan/results_io.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "probexpan/binary_io.h"
#include "probexpan/common.h"
#include "probexpan/queries.h"

namespace probexpan {
namespace {

constexpr std::string_view kHeader = "# probexpan expansion v1";

std::vector<std::string> Fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, '\t')) out.push_back(f);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

int ParseInt(const std::string& s, const std::string& source, int line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(source, line, "bad integer '" + s + "'");
  }
  return v;
}

double ParseDouble(const std::string& s, const std::string& source, int line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(source, line, "bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void WriteExpansionResults(std::ostream& out,
                           const std::vector<QueryExpansion>& results) {
  out << kHeader << '\n';
  for (const auto& q : results) {
    out << "query\t" << q.class_name << '\t';
    for (std::size_t i = 0; i < q.seeds.size(); ++i) {
      out << (i ? "|" : "") << q.seeds[i];
    }
    out << '\n';
    for (const auto& e : q.entries) {
      char score[40];
      std::snprintf(score, sizeof(score), "%.17g", e.score);
      out << "entity\t" << e.surface << '\t' << e.order << '\t' << e.rank
          << '\t' << score << '\n';
    }
    out << "end\n";
  }
}

void SaveExpansionResults(const std::filesystem::path& path,
                          const std::vector<QueryExpansion>& results) {
  std::ostringstream out;
  WriteExpansionResults(out, results);
  WriteFileBytes(path, out.str());
}

std::vector<QueryExpansion> ParseExpansionResults(std::istream& in,
                                                  const std::string& source) {
  std::vector<QueryExpansion> results;
  std::string line;
  int line_no = 0;
  bool open = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto f = Fields(line);
    if (f[0] == "query") {
      if (open) throw ParseError(source, line_no, "missing 'end' before query");
      if (f.size() != 3) throw ParseError(source, line_no, "bad query line");
      QueryExpansion q;
      q.class_name = f[1];
      q.seeds = SplitEntityList(f[2]);
      results.push_back(std::move(q));
      open = true;
    } else if (f[0] == "entity") {
      if (!open) throw ParseError(source, line_no, "entity outside a query");
      if (f.size() != 5) throw ParseError(source, line_no, "bad entity line");
      ExpandedEntry e;
      e.surface = f[1];
      e.order = ParseInt(f[2], source, line_no);
      e.rank = ParseInt(f[3], source, line_no);
      e.score = ParseDouble(f[4], source, line_no);
      results.back().entries.push_back(std::move(e));
    } else if (f[0] == "end") {
      if (!open) throw ParseError(source, line_no, "unmatched 'end'");
      open = false;
    } else {
      throw ParseError(source, line_no, "unknown record '" + f[0] + "'");
    }
  }
  if (open) throw ParseError(source, line_no, "unterminated query record");
  return results;
}

std::vector<QueryExpansion> LoadExpansionResults(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return ParseExpansionResults(in, path.string());
}

}  // namespace probexpan
