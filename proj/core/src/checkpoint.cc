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

#include "probexpan/checkpoint.h"

#include "probexpan/binary_io.h"

namespace probexpan {
namespace {

// Rows/cols of each tensor in canonical order.
std::array<std::pair<std::uint64_t, std::uint64_t>, ModelParams::kNumTensors>
TensorShapes(const ModelDims& d) {
  const std::uint64_t h = d.hidden;
  return {{{d.token_vocab, h},
           {h, h},
           {h, 1},
           {h, h},
           {h, 1},
           {d.entity_vocab, h},
           {d.entity_vocab, 1},
           {d.projection, h},
           {d.projection, 1}}};
}

}  // namespace

std::string SerializeCheckpoint(const ModelParams& params) {
  ByteWriter w;
  w.PutBytes(kCheckpointMagic);
  w.PutU32(kCheckpointVersion);
  w.PutU32(ModelParams::kNumTensors);
  const ModelDims& d = params.dims;
  w.PutU64(d.token_vocab);
  w.PutU64(d.entity_vocab);
  w.PutU64(d.hidden);
  w.PutU64(d.projection);
  w.PutU64(params.lineage.master_seed);
  w.PutU64(params.lineage.model_index);
  w.PutU64(params.lineage.init_seed);
  const auto shapes = TensorShapes(d);
  const auto tensors = params.Tensors();
  for (int t = 0; t < ModelParams::kNumTensors; ++t) {
    w.PutU64(shapes[t].first);
    w.PutU64(shapes[t].second);
    for (double v : tensors[t]) w.PutF64(v);
  }
  return w.Release();
}

ModelParams DeserializeCheckpoint(std::string_view bytes) {
  ByteReader r(bytes, "checkpoint");
  if (r.GetBytes(kCheckpointMagic.size()) != kCheckpointMagic) {
    throw Error("checkpoint: bad magic");
  }
  const std::uint32_t version = r.GetU32();
  if (version != kCheckpointVersion) {
    throw Error("checkpoint: unsupported version " + std::to_string(version));
  }
  if (r.GetU32() != ModelParams::kNumTensors) {
    throw Error("checkpoint: unexpected tensor count");
  }
  ModelDims dims;
  dims.token_vocab = static_cast<int>(r.GetU64());
  dims.entity_vocab = static_cast<int>(r.GetU64());
  dims.hidden = static_cast<int>(r.GetU64());
  dims.projection = static_cast<int>(r.GetU64());
  ModelParams params = ModelParams::Zeros(dims);
  params.lineage.master_seed = r.GetU64();
  params.lineage.model_index = r.GetU64();
  params.lineage.init_seed = r.GetU64();
  const auto shapes = TensorShapes(dims);
  auto tensors = params.Tensors();
  for (int t = 0; t < ModelParams::kNumTensors; ++t) {
    const std::uint64_t rows = r.GetU64();
    const std::uint64_t cols = r.GetU64();
    if (rows != shapes[t].first || cols != shapes[t].second) {
      throw Error("checkpoint: shape mismatch for " +
                  std::string(ModelParams::kTensorNames[t]));
    }
    for (double& v : tensors[t]) v = r.GetF64();
  }
  if (!r.AtEnd()) throw Error("checkpoint: trailing bytes");
  return params;
}

void SaveCheckpoint(const std::filesystem::path& path,
                    const ModelParams& params) {
  WriteFileBytes(path, SerializeCheckpoint(params));
}

ModelParams LoadCheckpoint(const std::filesystem::path& path) {
  try {
    return DeserializeCheckpoint(ReadFileBytes(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::uint64_t CheckpointChecksum(const ModelParams& params) {
  return Fnv1a64(SerializeCheckpoint(params));
}

}  // namespace probexpan
