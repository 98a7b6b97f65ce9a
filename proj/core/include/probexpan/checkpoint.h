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

// Model checkpoint container. Layout (all integers and doubles little-endian):
//
//   char[8]  magic "PXCKPT01"
//   u32      format version (1)
//   u32      tensor count (9)
//   u64 x 4  V_t, V_e, H, D
//   u64 x 3  master seed, model index, init seed
//   per tensor, in ModelParams::kTensorNames order:
//     u64 rows, u64 cols, rows*cols f64 row-major
//
// See docs/formats.md.

#ifndef PROBEXPAN_CHECKPOINT_H_
#define PROBEXPAN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "probexpan/model.h"

namespace probexpan {

inline constexpr std::string_view kCheckpointMagic = "PXCKPT01";
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string SerializeCheckpoint(const ModelParams& params);
ModelParams DeserializeCheckpoint(std::string_view bytes);

void SaveCheckpoint(const std::filesystem::path& path,
                    const ModelParams& params);
ModelParams LoadCheckpoint(const std::filesystem::path& path);

// FNV-1a over the serialized checkpoint; used as cache provenance.
std::uint64_t CheckpointChecksum(const ModelParams& params);

}  // namespace probexpan

#endif  // PROBEXPAN_CHECKPOINT_H_
