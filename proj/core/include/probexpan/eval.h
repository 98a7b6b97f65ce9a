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

#ifndef PROBEXPAN_EVAL_H_
#define PROBEXPAN_EVAL_H_

#include <span>
#include <string>
#include <unordered_set>
#include <vector>

namespace probexpan {

struct QueryResult {
  std::string name;
  std::vector<std::string> ranked;
  std::unordered_set<std::string> truth;
};

// sum_{k <= min(K, |ranked|)} rel(k) * prec@k / min(K, |truth|).
double AveragePrecisionAtK(const QueryResult& result, int k);

// Mean of AveragePrecisionAtK over all queries.
double MapAtK(std::span<const QueryResult> results, int k);

struct MethodReport {
  std::string method;
  std::vector<int> ks;
  std::vector<double> map;                    // one per k
  std::vector<std::string> query_names;       // one per query
  std::vector<std::vector<double>> query_ap;  // [query][k]
};

MethodReport Evaluate(const std::string& method,
                      std::span<const QueryResult> results,
                      std::span<const int> ks);

// Fixed-width table: one row per method, one MAP@K column per k, followed by
// the per-query breakdown.
std::string FormatReportTable(std::span<const MethodReport> reports);

// One JSON object per line.
std::string FormatReportRecords(std::span<const MethodReport> reports);

}  // namespace probexpan

#endif  // PROBEXPAN_EVAL_H_
