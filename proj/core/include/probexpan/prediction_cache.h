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

// Ensembled per-entity distributions, persisted once and read by expansion.
//
// File layout (little-endian):
//
//   char[8]  magic "PXCACHE1"
//   u32      format version (1)
//   u32      flags (bit 0: sparse rows)
//   u64      V_e
//   u32      top_m (0 for dense files)
//   u32      provenance count P
//   u64 x P  model checkpoint checksums
//   rows, entity order:
//     dense:  V_e x f64
//     sparse: u32 n, n x (u32 entity, f64 prob), f64 residual mass
//
// Sparse rows spread the residual mass uniformly over the V_e - n entities
// that are not listed. Dense rows are written when V_e <= dense_limit.

#ifndef PROBEXPAN_PREDICTION_CACHE_H_
#define PROBEXPAN_PREDICTION_CACHE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "probexpan/common.h"

namespace probexpan {

inline constexpr std::string_view kCacheMagic = "PXCACHE1";
inline constexpr std::uint32_t kCacheVersion = 1;

struct CacheWriteOptions {
  int dense_limit = 20000;
  int sparse_top_m = 4096;
};

class PredictionCache {
 public:
  PredictionCache() = default;
  // Every row must be a valid distribution of length rows.size().
  PredictionCache(std::vector<Distribution> rows,
                  std::vector<std::uint64_t> provenance);

  int num_entities() const { return static_cast<int>(rows_.size()); }
  std::span<const double> row(EntityId entity) const {
    return rows_.at(entity);
  }
  const std::vector<std::uint64_t>& provenance() const { return provenance_; }
  bool sparse_source() const { return sparse_source_; }

  // Highest-probability entries of one row; ties by entity id.
  std::vector<std::pair<EntityId, double>> Top(EntityId entity, int k) const;

  std::string Serialize(const CacheWriteOptions& options = {}) const;
  static PredictionCache Deserialize(std::string_view bytes,
                                     const std::string& source = "cache");

  void Save(const std::filesystem::path& path,
            const CacheWriteOptions& options = {}) const;
  static PredictionCache Load(const std::filesystem::path& path);

 private:
  std::vector<Distribution> rows_;
  std::vector<std::uint64_t> provenance_;
  bool sparse_source_ = false;
};

}  // namespace probexpan

#endif  // PROBEXPAN_PREDICTION_CACHE_H_
