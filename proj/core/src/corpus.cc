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

#include "probexpan/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace probexpan {
namespace {

constexpr std::string_view kOpenTag = "<e>";
constexpr std::string_view kCloseTag = "</e>";

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])))
      ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

// A line split into plain text and entity mentions.
struct Segment {
  bool mention = false;
  std::string text;  // normalized
};

std::vector<Segment> SplitMentions(std::string_view line,
                                   const std::string& source, int line_no) {
  std::vector<Segment> segments;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    const std::size_t open = line.find(kOpenTag, pos);
    const std::size_t close = line.find(kCloseTag, pos);
    if (close != std::string_view::npos &&
        (open == std::string_view::npos || close < open)) {
      throw ParseError(source, line_no, "unmatched </e>");
    }
    if (open == std::string_view::npos) {
      segments.push_back({false, NormalizeText(line.substr(pos))});
      break;
    }
    segments.push_back({false, NormalizeText(line.substr(pos, open - pos))});
    const std::size_t body = open + kOpenTag.size();
    const std::size_t end = line.find(kCloseTag, body);
    if (end == std::string_view::npos) {
      throw ParseError(source, line_no, "unterminated <e>");
    }
    const std::string_view inner = line.substr(body, end - body);
    if (inner.find(kOpenTag) != std::string_view::npos) {
      throw ParseError(source, line_no, "nested entity mention");
    }
    std::string surface = NormalizeText(inner);
    if (surface.empty()) {
      throw ParseError(source, line_no, "empty entity mention");
    }
    segments.push_back({true, std::move(surface)});
    pos = end + kCloseTag.size();
  }
  return segments;
}

}  // namespace

std::string NormalizeText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

EntityVocab::EntityVocab(std::vector<std::string> surfaces) {
  surfaces_.reserve(surfaces.size());
  for (auto& raw : surfaces) {
    std::string s = NormalizeText(raw);
    if (s.empty()) throw Error("empty entity surface");
    const auto id = static_cast<EntityId>(surfaces_.size());
    if (!index_.emplace(s, id).second) {
      throw Error("duplicate entity surface: " + s);
    }
    surfaces_.push_back(std::move(s));
  }
  if (surfaces_.size() < 2) {
    throw Error("entity vocabulary needs at least 2 entities");
  }
}

EntityVocab EntityVocab::Parse(std::istream& in, const std::string& source) {
  std::vector<std::string> surfaces;
  std::string line;
  int line_no = 0;
  std::unordered_map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = NormalizeText(line);
    if (s.empty()) continue;
    if (auto [it, inserted] = seen.emplace(s, line_no); !inserted) {
      throw ParseError(source, line_no,
                       "duplicate entity '" + s + "' (first on line " +
                           std::to_string(it->second) + ")");
    }
    surfaces.push_back(std::move(s));
  }
  return EntityVocab(std::move(surfaces));
}

EntityVocab EntityVocab::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open entity vocabulary " + path.string());
  return Parse(in, path.string());
}

std::optional<EntityId> EntityVocab::Find(std::string_view surface) const {
  auto it = index_.find(NormalizeText(surface));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

EntityId EntityVocab::IndexOf(std::string_view surface) const {
  if (auto id = Find(surface)) return *id;
  throw Error("unknown entity: " + std::string(surface));
}

TokenVocab::TokenVocab() { Intern(kMaskToken); }

TokenId TokenVocab::Intern(std::string_view token) {
  auto [it, inserted] =
      index_.emplace(std::string(token), static_cast<TokenId>(tokens_.size()));
  if (inserted) tokens_.emplace_back(token);
  return it->second;
}

std::optional<TokenId> TokenVocab::Find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Corpus::Corpus(std::vector<MaskedSample> samples, int num_entities)
    : samples_(std::move(samples)), samples_of_(num_entities) {
  if (num_entities < 1) throw Error("corpus needs at least one entity");
  for (int i = 0; i < static_cast<int>(samples_.size()); ++i) {
    const MaskedSample& s = samples_[i];
    if (s.entity_id < 0 || s.entity_id >= num_entities) {
      throw Error("sample " + std::to_string(i) + " has entity id out of range");
    }
    if (s.token_ids.empty() || s.mask_pos < 0 ||
        s.mask_pos >= static_cast<int>(s.token_ids.size()) ||
        s.token_ids[s.mask_pos] != TokenVocab::kMask) {
      throw Error("sample " + std::to_string(i) + " has no mask at mask_pos");
    }
    samples_of_[s.entity_id].push_back(i);
  }
  for (int e = 0; e < num_entities; ++e) {
    if (samples_of_[e].empty()) {
      throw Error("entity " + std::to_string(e) + " has no samples");
    }
  }
}

LoadedCorpus ParseCorpus(std::istream& in, const std::string& source,
                         EntityVocab vocab, const LoadOptions& options) {
  LoadedCorpus out;
  out.entities = std::move(vocab);
  std::vector<MaskedSample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::vector<Segment> segments = SplitMentions(line, source, line_no);

    // Token ids of every segment, plus the entity id of each mention.
    std::vector<std::vector<TokenId>> segment_tokens(segments.size());
    std::vector<std::optional<EntityId>> mention_entity(segments.size());
    for (std::size_t i = 0; i < segments.size(); ++i) {
      for (const auto& tok : SplitWhitespace(segments[i].text)) {
        segment_tokens[i].push_back(out.tokens.Intern(tok));
      }
      if (!segments[i].mention) continue;
      mention_entity[i] = out.entities.Find(segments[i].text);
      if (mention_entity[i]) continue;
      if (options.unknown_entities == UnknownEntityPolicy::kError) {
        throw ParseError(source, line_no,
                         "entity '" + segments[i].text + "' not in vocabulary");
      }
      ++out.skipped_mentions;
      if (options.warnings) {
        *options.warnings << "warning: " << source << ":" << line_no
                          << ": skipping unknown entity '" << segments[i].text
                          << "'\n";
      }
    }

    // One sample per known mention; the mention collapses to a single mask.
    for (std::size_t m = 0; m < segments.size(); ++m) {
      if (!mention_entity[m]) continue;
      MaskedSample sample;
      sample.entity_id = *mention_entity[m];
      for (std::size_t i = 0; i < segments.size(); ++i) {
        if (i == m) {
          sample.mask_pos = static_cast<int>(sample.token_ids.size());
          sample.token_ids.push_back(TokenVocab::kMask);
        } else {
          sample.token_ids.insert(sample.token_ids.end(),
                                  segment_tokens[i].begin(),
                                  segment_tokens[i].end());
        }
      }
      samples.push_back(std::move(sample));
    }
  }
  out.corpus = Corpus(std::move(samples), out.entities.size());
  return out;
}

LoadedCorpus LoadCorpus(const std::filesystem::path& corpus_path,
                        const std::filesystem::path& vocab_path,
                        const LoadOptions& options) {
  EntityVocab vocab = EntityVocab::Load(vocab_path);
  std::ifstream in(corpus_path);
  if (!in) throw Error("cannot open corpus " + corpus_path.string());
  return ParseCorpus(in, corpus_path.string(), std::move(vocab), options);
}

std::vector<int> BalancedEpochSamples(const Corpus& corpus, std::uint64_t seed) {
  const int n = corpus.num_entities();
  const auto cap = static_cast<std::size_t>(
      (static_cast<long long>(corpus.size()) + n - 1) / n);
  std::mt19937_64 rng(seed);
  std::vector<int> selected;
  selected.reserve(static_cast<std::size_t>(corpus.size()));
  std::vector<int> pool;
  for (EntityId e = 0; e < n; ++e) {
    auto own = corpus.SamplesOf(e);
    pool.assign(own.begin(), own.end());
    if (pool.size() > cap) {
      // Partial Fisher-Yates: the first `cap` slots become a uniform subset.
      for (std::size_t i = 0; i < cap; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
      }
      pool.resize(cap);
    }
    selected.insert(selected.end(), pool.begin(), pool.end());
  }
  std::shuffle(selected.begin(), selected.end(), rng);
  return selected;
}

}  // namespace probexpan
