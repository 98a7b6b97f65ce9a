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


#include <random>
#include <string>

#include <gtest/gtest.h>

#include "probexpan/checkpoint.h"
#include "test_util.h"

namespace probexpan {
namespace {

ModelParams Sample() {
  std::mt19937_64 rng(8);
  ModelParams p = testing::RandomParams({9, 6, 5, 3}, rng);
  p.lineage = {42, 2, 777};
  return p;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const ModelParams p = Sample();
  const ModelParams back = DeserializeCheckpoint(SerializeCheckpoint(p));
  EXPECT_TRUE(back == p);
  EXPECT_EQ(back.lineage, p.lineage);
  EXPECT_EQ(back.dims, p.dims);
  EXPECT_EQ(CheckpointChecksum(back), CheckpointChecksum(p));
}

TEST(Checkpoint, ChecksumSeesEveryChange) {
  ModelParams p = Sample();
  const auto before = CheckpointChecksum(p);
  p.proj_b(2) += 1e-12;
  EXPECT_NE(CheckpointChecksum(p), before);
}

TEST(Checkpoint, RejectsBadMagicVersionAndTruncation) {
  const std::string bytes = SerializeCheckpoint(Sample());
  std::string bad = bytes;
  bad[3] = '?';
  EXPECT_THROW(DeserializeCheckpoint(bad), Error);
  bad = bytes;
  bad[8] = 2;
  EXPECT_THROW(DeserializeCheckpoint(bad), Error);
  EXPECT_THROW(DeserializeCheckpoint(bytes.substr(0, bytes.size() - 1)), Error);
  EXPECT_THROW(DeserializeCheckpoint(bytes + '\0'), Error);
}

TEST(Checkpoint, RejectsShapeMismatch) {
  std::string bytes = SerializeCheckpoint(Sample());
  // First tensor header follows magic, version, count, four dims, lineage.
  const std::size_t rows_offset = 8 + 4 + 4 + 4 * 8 + 3 * 8;
  bytes[rows_offset] = 10;
  try {
    DeserializeCheckpoint(bytes);
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("token_embeddings"), std::string::npos);
  }
}

TEST(Checkpoint, FileRoundTripNamesPathOnError) {
  testing::TempDir dir("ckpt");
  const auto path = dir.path() / "models" / "model_0.ckpt";
  SaveCheckpoint(path, Sample());
  EXPECT_TRUE(LoadCheckpoint(path) == Sample());
  testing::WriteText(dir.path() / "junk.ckpt", "nope");
  try {
    LoadCheckpoint(dir.path() / "junk.ckpt");
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("junk.ckpt"), std::string::npos);
  }
}

}  // namespace
}  // namespace probexpan
