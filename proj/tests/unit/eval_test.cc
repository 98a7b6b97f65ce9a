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


#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "probexpan/common.h"
#include "probexpan/eval.h"

namespace probexpan {
namespace {

QueryResult Make(std::vector<std::string> ranked,
                 std::unordered_set<std::string> truth,
                 std::string name = "q") {
  return {std::move(name), std::move(ranked), std::move(truth)};
}

TEST(AveragePrecision, PerfectRanking) {
  EXPECT_NEAR(AveragePrecisionAtK(Make({"a", "c"}, {"a", "c"}), 2), 1.0, 1e-12);
}

TEST(AveragePrecision, NoHits) {
  EXPECT_NEAR(AveragePrecisionAtK(Make({"x", "y", "z"}, {"a"}), 3), 0.0, 1e-12);
}

TEST(AveragePrecision, InterleavedHit) {
  EXPECT_NEAR(AveragePrecisionAtK(Make({"a", "b", "c"}, {"a", "c"}), 3),
              5.0 / 6.0, 1e-12);
}

TEST(AveragePrecision, NormalizedByTruncatedTruth) {
  const auto r = Make({"a", "b", "x"}, {"a", "b", "c", "d", "e"});
  EXPECT_NEAR(AveragePrecisionAtK(r, 2), 1.0, 1e-12);
  EXPECT_NEAR(AveragePrecisionAtK(r, 5), 2.0 / 5.0, 1e-12);
}

TEST(AveragePrecision, ShortListAndBadInputs) {
  EXPECT_NEAR(AveragePrecisionAtK(Make({"a"}, {"a", "b"}), 10), 0.5, 1e-12);
  EXPECT_THROW(AveragePrecisionAtK(Make({"a"}, {"a"}), 0), Error);
  EXPECT_THROW(AveragePrecisionAtK(Make({"a"}, {}), 1), Error);
}

TEST(AveragePrecision, BoundedAndMonotoneUnderDemotion) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> ranked;
    std::unordered_set<std::string> truth;
    for (int i = 0; i < 12; ++i) {
      ranked.push_back("e" + std::to_string(i));
      if (rng() % 2) truth.insert(ranked.back());
    }
    if (truth.empty()) truth.insert("e0");
    std::shuffle(ranked.begin(), ranked.end(), rng);
    const double ap = AveragePrecisionAtK(Make(ranked, truth), 8);
    EXPECT_GE(ap, 0.0);
    EXPECT_LE(ap, 1.0);
    for (std::size_t i = 0; i + 1 < ranked.size(); ++i) {
      if (truth.count(ranked[i]) && !truth.count(ranked[i + 1])) {
        auto swapped = ranked;
        std::swap(swapped[i], swapped[i + 1]);
        EXPECT_LE(AveragePrecisionAtK(Make(swapped, truth), 8), ap + 1e-15);
      }
    }
  }
}

TEST(MapAtK, MeanOfQueries) {
  const std::vector<QueryResult> one{Make({"a", "b", "c"}, {"a", "c"})};
  EXPECT_NEAR(MapAtK(one, 3), 5.0 / 6.0, 1e-12);
  std::vector<QueryResult> two{Make({"a"}, {"a"}, "p"), Make({"x"}, {"a"}, "q")};
  EXPECT_NEAR(MapAtK(two, 10), 0.5, 1e-12);
  std::swap(two[0], two[1]);
  EXPECT_NEAR(MapAtK(two, 10), 0.5, 1e-12);
  EXPECT_THROW(MapAtK({}, 10), Error);
}

TEST(Evaluate, ReportShapeAndFormats) {
  const std::vector<QueryResult> results{
      Make({"a", "b", "c"}, {"a", "c"}, "city"),
      Make({"x", "y"}, {"x"}, "state")};
  const std::vector<int> ks{1, 3};
  const MethodReport report = Evaluate("probexpan", results, ks);
  EXPECT_EQ(report.ks, ks);
  ASSERT_EQ(report.map.size(), 2u);
  EXPECT_NEAR(report.map[0], 1.0, 1e-12);
  EXPECT_NEAR(report.map[1], (5.0 / 6.0 + 1.0) / 2.0, 1e-12);
  EXPECT_EQ(report.query_names, (std::vector<std::string>{"city", "state"}));
  EXPECT_NEAR(report.query_ap[0][1], 5.0 / 6.0, 1e-12);

  const std::vector<MethodReport> reports{report};
  const std::string table = FormatReportTable(reports);
  EXPECT_NE(table.find("MAP@1"), std::string::npos);
  EXPECT_NE(table.find("MAP@3"), std::string::npos);
  EXPECT_NE(table.find("0.9167"), std::string::npos);
  EXPECT_NE(table.find("city"), std::string::npos);

  const std::string records = FormatReportRecords(reports);
  EXPECT_NE(records.find("{\"method\":\"probexpan\",\"k\":3,\"map\":0.916666666667}"),
            std::string::npos);
  EXPECT_EQ(std::count(records.begin(), records.end(), '\n'), 6);
  EXPECT_THROW(Evaluate("m", results, {}), Error);
}

}  // namespace
}  // namespace probexpan
