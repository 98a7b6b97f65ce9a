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

#include "probexpan/prediction_cache.h"

#include <algorithm>
#include <numeric>

#include "probexpan/binary_io.h"

namespace probexpan {
namespace {

constexpr std::uint32_t kSparseFlag = 1;

// Row entries sorted by descending probability, ties by entity id.
std::vector<EntityId> RankRow(std::span<const double> row) {
  std::vector<EntityId> order(row.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](EntityId a, EntityId b) { return row[a] > row[b]; });
  return order;
}

}  // namespace

PredictionCache::PredictionCache(std::vector<Distribution> rows,
                                 std::vector<std::uint64_t> provenance)
    : rows_(std::move(rows)), provenance_(std::move(provenance)) {
  for (std::size_t e = 0; e < rows_.size(); ++e) {
    if (rows_[e].size() != rows_.size()) {
      throw Error("prediction cache: row " + std::to_string(e) +
                  " has wrong length");
    }
    if (!IsDistribution(rows_[e])) {
      throw Error("prediction cache: row " + std::to_string(e) +
                  " is not a distribution");
    }
  }
}

std::vector<std::pair<EntityId, double>> PredictionCache::Top(EntityId entity,
                                                              int k) const {
  const auto r = row(entity);
  auto order = RankRow(r);
  order.resize(std::min<std::size_t>(order.size(), std::max(k, 0)));
  std::vector<std::pair<EntityId, double>> out;
  for (EntityId e : order) out.emplace_back(e, r[e]);
  return out;
}

std::string PredictionCache::Serialize(const CacheWriteOptions& options) const {
  const std::size_t ve = rows_.size();
  const bool sparse = static_cast<long long>(ve) > options.dense_limit;
  const std::size_t top_m =
      sparse ? std::min<std::size_t>(ve, std::max(options.sparse_top_m, 1)) : 0;
  ByteWriter w;
  w.PutBytes(kCacheMagic);
  w.PutU32(kCacheVersion);
  w.PutU32(sparse ? kSparseFlag : 0);
  w.PutU64(ve);
  w.PutU32(static_cast<std::uint32_t>(top_m));
  w.PutU32(static_cast<std::uint32_t>(provenance_.size()));
  for (auto c : provenance_) w.PutU64(c);
  for (const auto& row : rows_) {
    if (!sparse) {
      for (double v : row) w.PutF64(v);
      continue;
    }
    auto order = RankRow(row);
    order.resize(top_m);
    double kept = 0.0;
    for (EntityId e : order) kept += row[e];
    w.PutU32(static_cast<std::uint32_t>(top_m));
    for (EntityId e : order) {
      w.PutU32(static_cast<std::uint32_t>(e));
      w.PutF64(row[e]);
    }
    w.PutF64(std::max(0.0, 1.0 - kept));
  }
  return w.Release();
}

PredictionCache PredictionCache::Deserialize(std::string_view bytes,
                                             const std::string& source) {
  ByteReader r(bytes, source);
  if (r.GetBytes(kCacheMagic.size()) != kCacheMagic) {
    throw Error(source + ": not a prediction cache");
  }
  const std::uint32_t version = r.GetU32();
  if (version != kCacheVersion) {
    throw Error(source + ": unsupported cache version " +
                std::to_string(version));
  }
  const bool sparse = (r.GetU32() & kSparseFlag) != 0;
  const std::uint64_t ve = r.GetU64();
  const std::uint32_t top_m = r.GetU32();
  const std::uint32_t n_prov = r.GetU32();
  std::vector<std::uint64_t> provenance(n_prov);
  for (auto& c : provenance) c = r.GetU64();
  std::vector<Distribution> rows(ve);
  for (auto& row : rows) {
    if (!sparse) {
      row.resize(ve);
      for (double& v : row) v = r.GetF64();
      continue;
    }
    const std::uint32_t n = r.GetU32();
    if (n > top_m || n > ve) throw Error(source + ": bad sparse row");
    std::vector<std::pair<std::uint32_t, double>> entries(n);
    for (auto& [idx, p] : entries) {
      idx = r.GetU32();
      p = r.GetF64();
      if (idx >= ve) throw Error(source + ": sparse index out of range");
    }
    const double residual = r.GetF64();
    const double fill = n < ve ? residual / static_cast<double>(ve - n) : 0.0;
    row.assign(ve, fill);
    for (const auto& [idx, p] : entries) row[idx] = p;
  }
  if (!r.AtEnd()) throw Error(source + ": trailing bytes");
  PredictionCache cache(std::move(rows), std::move(provenance));
  cache.sparse_source_ = sparse;
  return cache;
}

void PredictionCache::Save(const std::filesystem::path& path,
                           const CacheWriteOptions& options) const {
  WriteFileBytes(path, Serialize(options));
}

PredictionCache PredictionCache::Load(const std::filesystem::path& path) {
  return Deserialize(ReadFileBytes(path), path.string());
}

}  // namespace probexpan
