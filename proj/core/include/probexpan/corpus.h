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

// Corpus loading and masked-sample extraction.
//
// Corpus file: one sentence per line, entity mentions wrapped as
// `<e>surface</e>` (no nesting). Entity vocabulary file: one surface per
// line, line order defines the entity index. Text is normalized to
// lowercase with collapsed whitespace and split on whitespace.

#ifndef PROBEXPAN_CORPUS_H_
#define PROBEXPAN_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "probexpan/common.h"

namespace probexpan {

// Lowercases ASCII, trims, and collapses whitespace runs to one space.
std::string NormalizeText(std::string_view text);

class EntityVocab {
 public:
  EntityVocab() = default;
  // Surfaces are normalized; duplicates after normalization or fewer than two
  // entities are rejected.
  explicit EntityVocab(std::vector<std::string> surfaces);

  static EntityVocab Load(const std::filesystem::path& path);
  static EntityVocab Parse(std::istream& in, const std::string& source);

  int size() const { return static_cast<int>(surfaces_.size()); }
  const std::string& surface(EntityId id) const { return surfaces_.at(id); }
  const std::vector<std::string>& surfaces() const { return surfaces_; }

  std::optional<EntityId> Find(std::string_view surface) const;
  // Throws Error when the surface is unknown.
  EntityId IndexOf(std::string_view surface) const;

 private:
  std::vector<std::string> surfaces_;
  std::unordered_map<std::string, EntityId> index_;
};

class TokenVocab {
 public:
  static constexpr TokenId kMask = 0;
  static constexpr std::string_view kMaskToken = "[MASK]";

  TokenVocab();

  // Returns the id of `token`, adding it when new.
  TokenId Intern(std::string_view token);
  std::optional<TokenId> Find(std::string_view token) const;

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

struct MaskedSample {
  std::vector<TokenId> token_ids;
  int mask_pos = 0;
  EntityId entity_id = 0;

  bool operator==(const MaskedSample&) const = default;
};

// Immutable after construction.
class Corpus {
 public:
  Corpus() = default;
  // Validates entity ids and that every entity owns at least one sample.
  Corpus(std::vector<MaskedSample> samples, int num_entities);

  const std::vector<MaskedSample>& samples() const { return samples_; }
  const MaskedSample& sample(int index) const { return samples_.at(index); }
  std::span<const int> SamplesOf(EntityId entity) const {
    return samples_of_.at(entity);
  }
  int num_entities() const { return static_cast<int>(samples_of_.size()); }
  int size() const { return static_cast<int>(samples_.size()); }

  bool operator==(const Corpus&) const = default;

 private:
  std::vector<MaskedSample> samples_;
  std::vector<std::vector<int>> samples_of_;
};

enum class UnknownEntityPolicy { kError, kSkip };

struct LoadOptions {
  UnknownEntityPolicy unknown_entities = UnknownEntityPolicy::kError;
  // Receives skip-mode warnings; null silences them.
  std::ostream* warnings = nullptr;
};

struct LoadedCorpus {
  Corpus corpus;
  EntityVocab entities;
  TokenVocab tokens;
  int skipped_mentions = 0;
};

LoadedCorpus LoadCorpus(const std::filesystem::path& corpus_path,
                        const std::filesystem::path& vocab_path,
                        const LoadOptions& options = {});

LoadedCorpus ParseCorpus(std::istream& corpus, const std::string& source,
                         EntityVocab vocab, const LoadOptions& options = {});

// Indices of the samples used for one training epoch. Each entity keeps at
// most ceil(total / V_e) of its samples, chosen uniformly without replacement;
// the result is shuffled. Deterministic in `seed`.
std::vector<int> BalancedEpochSamples(const Corpus& corpus, std::uint64_t seed);

}  // namespace probexpan

#endif  // PROBEXPAN_CORPUS_H_
