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

#include <sstream>

#include <gtest/gtest.h>

#include "probexpan/queries.h"

namespace probexpan {
namespace {

TEST(SeedQueries, ParsesTwoAndThreeFieldRecords) {
  std::istringstream in(
      "# class\tseeds\ttruth\n"
      "States\tOhio|Texas | Utah\n"
      "\n"
      "cities\tparis|rome\tberlin|madrid\n");
  const auto q = ParseSeedQueries(in, "seeds");
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[0].class_name, "states");
  EXPECT_EQ(q[0].seeds, (std::vector<std::string>{"ohio", "texas", "utah"}));
  EXPECT_TRUE(q[0].truth.empty());
  EXPECT_EQ(q[1].truth, (std::vector<std::string>{"berlin", "madrid"}));
}

TEST(SeedQueries, RoundTripsThroughWriter) {
  std::vector<SeedQuery> queries = {
      {"a", {"x", "y", "z"}, {"w"}},
      {"b", {"p", "q"}, {}},
  };
  std::ostringstream out;
  WriteSeedQueries(out, queries);
  std::istringstream in(out.str());
  EXPECT_EQ(ParseSeedQueries(in, "rt"), queries);
}

TEST(SeedQueries, RejectsMalformedLines) {
  std::istringstream one_field("states\n");
  EXPECT_THROW(ParseSeedQueries(one_field, "s"), ParseError);
  std::istringstream no_seeds("states\t | \n");
  EXPECT_THROW(ParseSeedQueries(no_seeds, "s"), ParseError);
  std::istringstream four("a\tb\tc\td\n");
  EXPECT_THROW(ParseSeedQueries(four, "s"), ParseError);
}

TEST(GroundTruth, ParsesAndRejectsDuplicates) {
  std::istringstream in("a\tx|y\nb\tz\n");
  const auto truth = ParseGroundTruth(in, "truth");
  EXPECT_EQ(truth.at("a"), (std::vector<std::string>{"x", "y"}));
  std::istringstream dup("a\tx\na\ty\n");
  EXPECT_THROW(ParseGroundTruth(dup, "truth"), ParseError);
}

TEST(ResolveSeeds, MapsSurfacesAndRejectsUnknown) {
  const EntityVocab vocab({"x", "y", "z"});
  EXPECT_EQ(ResolveSeeds({"c", {"z", "x", "z"}, {}}, vocab),
            (std::vector<EntityId>{2, 0}));
  EXPECT_THROW(ResolveSeeds({"c", {"nope"}, {}}, vocab), Error);
}

TEST(GroupSeedsByClass, UnionsSeedsInFirstAppearanceOrder) {
  const EntityVocab vocab({"a", "b", "c", "d"});
  const std::vector<SeedQuery> queries = {
      {"k2", {"c"}, {}}, {"k1", {"a", "b"}, {}}, {"k2", {"d", "c"}, {}}};
  const auto classes = GroupSeedsByClass(queries, vocab);
  ASSERT_EQ(classes.size(), 2u);
  EXPECT_EQ(classes[0].class_name, "k2");
  EXPECT_EQ(classes[0].seeds, (std::vector<EntityId>{2, 3}));
  EXPECT_EQ(classes[1].seeds, (std::vector<EntityId>{0, 1}));
}

}  // namespace
}  // namespace probexpan
