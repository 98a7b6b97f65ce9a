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

#include "probexpan/eval.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "probexpan/common.h"

namespace probexpan {
namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string JsonString(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

}  // namespace

double AveragePrecisionAtK(const QueryResult& result, int k) {
  if (k < 1) throw Error("AP@K: K must be >= 1");
  if (result.truth.empty()) {
    throw Error("AP@K: query '" + result.name + "' has an empty truth set");
  }
  const int depth = std::min<int>(k, static_cast<int>(result.ranked.size()));
  int hits = 0;
  double sum = 0.0;
  for (int i = 0; i < depth; ++i) {
    if (result.truth.count(result.ranked[i])) {
      ++hits;
      sum += static_cast<double>(hits) / (i + 1);
    }
  }
  return sum / std::min<double>(k, static_cast<double>(result.truth.size()));
}

double MapAtK(std::span<const QueryResult> results, int k) {
  if (results.empty()) throw Error("MAP@K: no queries");
  double total = 0.0;
  for (const auto& r : results) total += AveragePrecisionAtK(r, k);
  return total / static_cast<double>(results.size());
}

MethodReport Evaluate(const std::string& method,
                      std::span<const QueryResult> results,
                      std::span<const int> ks) {
  if (ks.empty()) throw Error("evaluate: no K values");
  MethodReport report;
  report.method = method;
  report.ks.assign(ks.begin(), ks.end());
  for (const auto& r : results) {
    report.query_names.push_back(r.name);
    std::vector<double> aps;
    for (int k : ks) aps.push_back(AveragePrecisionAtK(r, k));
    report.query_ap.push_back(std::move(aps));
  }
  for (int k : ks) report.map.push_back(MapAtK(results, k));
  return report;
}

std::string FormatReportTable(std::span<const MethodReport> reports) {
  if (reports.empty()) return "";
  std::size_t width = 6;
  for (const auto& r : reports) width = std::max(width, r.method.size());
  for (const auto& r : reports) {
    for (const auto& q : r.query_names) width = std::max(width, q.size() + 2);
  }

  std::ostringstream out;
  auto pad = [&](const std::string& s) {
    out << s << std::string(width - s.size() + 2, ' ');
  };
  pad("Method");
  for (std::size_t i = 0; i < reports.front().ks.size(); ++i) {
    out << (i ? "  " : "") << "MAP@" << reports.front().ks[i];
  }
  out << '\n';
  for (const auto& r : reports) {
    pad(r.method);
    for (std::size_t i = 0; i < r.map.size(); ++i) {
      const std::string head = "MAP@" + std::to_string(r.ks[i]);
      std::string cell = Fixed(r.map[i], 4);
      if (cell.size() < head.size()) cell.resize(head.size(), ' ');
      out << (i ? "  " : "") << cell;
    }
    out << '\n';
    for (std::size_t q = 0; q < r.query_names.size(); ++q) {
      pad("  " + r.query_names[q]);
      for (std::size_t i = 0; i < r.query_ap[q].size(); ++i) {
        const std::string head = "MAP@" + std::to_string(r.ks[i]);
        std::string cell = Fixed(r.query_ap[q][i], 4);
        if (cell.size() < head.size()) cell.resize(head.size(), ' ');
        out << (i ? "  " : "") << cell;
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string FormatReportRecords(std::span<const MethodReport> reports) {
  std::ostringstream out;
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.ks.size(); ++i) {
      out << "{\"method\":" << JsonString(r.method) << ",\"k\":" << r.ks[i]
          << ",\"map\":" << Fixed(r.map[i], 12) << "}\n";
    }
    for (std::size_t q = 0; q < r.query_names.size(); ++q) {
      for (std::size_t i = 0; i < r.ks.size(); ++i) {
        out << "{\"method\":" << JsonString(r.method)
            << ",\"query\":" << JsonString(r.query_names[q])
            << ",\"k\":" << r.ks[i]
            << ",\"ap\":" << Fixed(r.query_ap[q][i], 12) << "}\n";
      }
    }
  }
  return out.str();
}

}  // namespace probexpan
