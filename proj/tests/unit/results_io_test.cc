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
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "probexpan/results_io.h"
#include "test_util.h"

namespace probexpan {
namespace {

std::vector<QueryExpansion> Sample() {
  return {{"city", {"paris", "rome"}, {{"berlin", 1, 2, 0.7071067811865476},
                                       {"new york", 2, 1, 0.1 + 0.2}}},
          {"state", {"ohio"}, {}}};
}

TEST(ExpansionResults, RoundTripIsExact) {
  std::ostringstream out;
  WriteExpansionResults(out, Sample());
  std::istringstream in(out.str());
  EXPECT_EQ(ParseExpansionResults(in, "mem"), Sample());
}

TEST(ExpansionResults, TextLayout) {
  std::ostringstream out;
  WriteExpansionResults(out, {{"c", {"a"}, {{"b", 1, 0, 0.0}}}});
  EXPECT_EQ(out.str(),
            "# probexpan expansion v1\n"
            "query\tc\ta\n"
            "entity\tb\t1\t0\t0\n"
            "end\n");
}

TEST(ExpansionResults, FileRoundTrip) {
  testing::TempDir dir("results");
  const auto path = dir.path() / "expansion" / "final.txt";
  SaveExpansionResults(path, Sample());
  EXPECT_EQ(LoadExpansionResults(path), Sample());
  EXPECT_THROW(LoadExpansionResults(dir.path() / "none.txt"), Error);
}

void ExpectParseError(const std::string& text, int line) {
  std::istringstream in(text);
  try {
    ParseExpansionResults(in, "bad.txt");
    FAIL() << "expected ParseError for: " << text;
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.txt:" + std::to_string(line)),
              std::string::npos)
        << e.what();
  }
}

TEST(ExpansionResults, MalformedInputs) {
  ExpectParseError("entity\ta\t1\t0\t0\n", 1);
  ExpectParseError("query\tc\ta\nquery\td\tb\n", 2);
  ExpectParseError("query\tc\n", 1);
  ExpectParseError("query\tc\ta\nentity\tb\tone\t0\t0\nend\n", 2);
  ExpectParseError("query\tc\ta\nentity\tb\t1\t0\tnan?\nend\n", 2);
  ExpectParseError("end\n", 1);
  ExpectParseError("bogus\n", 1);
  ExpectParseError("query\tc\ta\nentity\tb\t1\t0\t0\n", 2);
}

}  // namespace
}  // namespace probexpan
