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
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "probexpan/corpus.h"

namespace probexpan {
namespace {

LoadedCorpus ParseText(const std::string& corpus, std::vector<std::string> vocab,
                       const LoadOptions& options = {}) {
  std::istringstream in(corpus);
  return ParseCorpus(in, "test", EntityVocab(std::move(vocab)), options);
}

std::vector<std::string> Tokens(const LoadedCorpus& c, const MaskedSample& s) {
  std::vector<std::string> out;
  for (TokenId t : s.token_ids) out.push_back(c.tokens.token(t));
  return out;
}

TEST(NormalizeText, LowercasesAndCollapsesWhitespace) {
  EXPECT_EQ(NormalizeText("  New\t\tYork  City "), "new york city");
  EXPECT_EQ(NormalizeText(""), "");
}

TEST(EntityVocab, IndicesFollowLineOrder) {
  std::istringstream in("France\nparis\n\n  Berlin \n");
  const EntityVocab v = EntityVocab::Parse(in, "vocab");
  ASSERT_EQ(v.size(), 3);
  EXPECT_EQ(v.IndexOf("france"), 0);
  EXPECT_EQ(v.IndexOf("Paris"), 1);
  EXPECT_EQ(v.IndexOf("berlin"), 2);
  EXPECT_FALSE(v.Find("rome").has_value());
  EXPECT_THROW(v.IndexOf("rome"), Error);
}

TEST(EntityVocab, RejectsDuplicatesAfterNormalization) {
  EXPECT_THROW(EntityVocab({"Paris", "paris"}), Error);
}

TEST(EntityVocab, RejectsFewerThanTwoEntities) {
  EXPECT_THROW(EntityVocab({"paris"}), Error);
}

TEST(ParseCorpus, OneSamplePerMention) {
  const auto c = ParseText("the capital of <e>france</e> is <e>paris</e>\n",
                           {"france", "paris"});
  ASSERT_EQ(c.corpus.size(), 2);
  EXPECT_EQ(c.corpus.sample(0).entity_id, 0);
  EXPECT_EQ(c.corpus.sample(1).entity_id, 1);
  EXPECT_EQ(Tokens(c, c.corpus.sample(0)),
            (std::vector<std::string>{"the", "capital", "of", "[MASK]", "is",
                                      "paris"}));
  EXPECT_EQ(c.corpus.sample(0).mask_pos, 3);
  EXPECT_EQ(c.corpus.sample(1).mask_pos, 5);
}

TEST(ParseCorpus, MultiTokenSpanCollapsesToOneMask) {
  const auto c = ParseText("i love <e>New York</e> a lot\nsee <e>b</e>\n",
                           {"new york", "b"});
  const MaskedSample& s = c.corpus.sample(0);
  EXPECT_EQ(Tokens(c, s),
            (std::vector<std::string>{"i", "love", "[MASK]", "a", "lot"}));
  EXPECT_EQ(s.token_ids[s.mask_pos], TokenVocab::kMask);
}

TEST(ParseCorpus, UnknownEntityErrorsWithLineNumber) {
  try {
    ParseText("<e>a</e>\n<e>b</e>\n<e>zzz</e> here\n", {"a", "b"});
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
}

TEST(ParseCorpus, UnknownEntitySkipModeWarns) {
  std::ostringstream warnings;
  LoadOptions opts;
  opts.unknown_entities = UnknownEntityPolicy::kSkip;
  opts.warnings = &warnings;
  const auto with = ParseText("<e>a</e> x <e>zzz</e>\n<e>b</e>\n", {"a", "b"}, opts);
  const auto without = ParseText("<e>a</e> x\n<e>b</e>\n", {"a", "b"});
  EXPECT_EQ(with.corpus.size(), without.corpus.size());
  EXPECT_EQ(with.skipped_mentions, 1);
  EXPECT_NE(warnings.str().find("zzz"), std::string::npos);
}

TEST(ParseCorpus, MalformedMarkupIsRejected) {
  EXPECT_THROW(ParseText("<e>a b\n", {"a", "b"}), ParseError);
  EXPECT_THROW(ParseText("<e>a <e>b</e></e>\n", {"a", "b"}), ParseError);
  EXPECT_THROW(ParseText("a</e>\n", {"a", "b"}), ParseError);
  EXPECT_THROW(ParseText("<e> </e>\n", {"a", "b"}), ParseError);
}

TEST(ParseCorpus, EntityWithoutSamplesIsRejected) {
  EXPECT_THROW(ParseText("<e>a</e>\n", {"a", "b"}), Error);
}

TEST(ParseCorpus, IdempotentLoad) {
  const std::string text = "x <e>a</e> y\n<e>b</e> z <e>a</e>\n";
  const auto first = ParseText(text, {"a", "b"});
  const auto second = ParseText(text, {"a", "b"});
  EXPECT_EQ(first.corpus, second.corpus);
  EXPECT_EQ(first.corpus.SamplesOf(0).size(), 2u);
}

Corpus CountsCorpus(const std::vector<int>& counts) {
  std::vector<MaskedSample> samples;
  for (int e = 0; e < static_cast<int>(counts.size()); ++e) {
    for (int i = 0; i < counts[e]; ++i) {
      samples.push_back(MaskedSample{{TokenVocab::kMask, 1 + i}, 0, e});
    }
  }
  return Corpus(std::move(samples), static_cast<int>(counts.size()));
}

TEST(BalancedEpochSamples, CapsAtAverage) {
  const Corpus c = CountsCorpus({4, 2, 3});
  const auto sel = BalancedEpochSamples(c, 11);
  std::vector<int> per(3, 0);
  for (int i : sel) ++per[c.sample(i).entity_id];
  EXPECT_EQ(per, (std::vector<int>{3, 2, 3}));
  EXPECT_EQ(std::set<int>(sel.begin(), sel.end()).size(), sel.size());
}

TEST(BalancedEpochSamples, EqualCountsSelectEverything) {
  const Corpus c = CountsCorpus({3, 3, 3});
  auto sel = BalancedEpochSamples(c, 5);
  std::sort(sel.begin(), sel.end());
  std::vector<int> all(9);
  for (int i = 0; i < 9; ++i) all[i] = i;
  EXPECT_EQ(sel, all);
}

TEST(BalancedEpochSamples, DeterministicAndCoversAllSubsets) {
  const Corpus c = CountsCorpus({4, 2, 3});
  EXPECT_EQ(BalancedEpochSamples(c, 3), BalancedEpochSamples(c, 3));
  std::set<std::set<int>> subsets;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    std::set<int> of_a;
    for (int i : BalancedEpochSamples(c, seed)) {
      if (c.sample(i).entity_id == 0) of_a.insert(i);
    }
    subsets.insert(of_a);
  }
  EXPECT_EQ(subsets.size(), 4u);
}

TEST(BalancedEpochSamples, CapPropertyOnRandomCounts) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> count(1, 12), size(2, 8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> counts(size(rng));
    int total = 0;
    for (int& k : counts) total += (k = count(rng));
    const Corpus c = CountsCorpus(counts);
    const int cap = (total + static_cast<int>(counts.size()) - 1) /
                    static_cast<int>(counts.size());
    std::vector<int> per(counts.size(), 0);
    for (int i : BalancedEpochSamples(c, trial)) ++per[c.sample(i).entity_id];
    for (std::size_t e = 0; e < counts.size(); ++e) {
      EXPECT_EQ(per[e], std::min(cap, counts[e]));
    }
  }
}

}  // namespace
}  // namespace probexpan
