// ngram.hpp
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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctcfuse/textnorm.hpp"

namespace ctcfuse {

inline const std::string kUnkToken = "<unk>";
inline const std::string kBosToken = "<s>";
inline const std::string kEosToken = "</s>";

// Word-level models are capped at 4-grams; higher orders are rejected
// unless explicitly overridden when reading ARPA files.
constexpr int kOrderCap = 4;
// Hard structural limit of the n-gram key encoding.
constexpr int kMaxSupportedOrder = 8;

// String<->id interning. Ids 0/1/2 are always <unk>/<s>/</s>, the rest
// follow first-seen order, which keeps every artifact deterministic.
class Vocab {
 public:
  static constexpr uint32_t kUnkId = 0;
  static constexpr uint32_t kBosId = 1;
  static constexpr uint32_t kEosId = 2;

  Vocab();

  uint32_t intern(const std::string &token);
  std::optional<uint32_t> find(const std::string &token) const;
  const std::string &token(uint32_t id) const { return id_to_token_[id]; }
  size_t size() const { return id_to_token_.size(); }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, uint32_t> token_to_id_;
};

// Token tuple of length <= kMaxSupportedOrder, used as the hash key of
// every per-order table.
struct NGramKey {
  std::array<uint32_t, kMaxSupportedOrder> words{};
  uint8_t len = 0;

  static NGramKey of(std::span<const uint32_t> ids);
  NGramKey context() const;                  // first len-1 words
  NGramKey suffix() const;                   // last len-1 words
  NGramKey extended(uint32_t word) const;    // this + word

  bool operator==(const NGramKey &o) const {
    if (len != o.len) return false;
    for (uint8_t i = 0; i < len; ++i)
      if (words[i] != o.words[i]) return false;
    return true;
  }
  bool operator<(const NGramKey &o) const;
};

struct NGramKeyHash {
  size_t operator()(const NGramKey &k) const {
    uint64_t h = 1469598103934665603ull;
    for (uint8_t i = 0; i < k.len; ++i) {
      h ^= k.words[i];
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h ^ k.len);
  }
};

template <typename V>
using NGramTable = std::unordered_map<NGramKey, V, NGramKeyHash>;

// Raw sliding-window counts over sentence-padded word sequences for every
// order 1..order. Prefix-closed by construction: each counted n-gram's
// (n-1)-prefix is counted too.
struct NGramCounts {
  int order = 0;
  Vocab vocab;
  std::vector<NGramTable<uint64_t>> tables;  // tables[n-1] holds n-grams
  // Raw count mass of unigram types removed by prune(); feeds the <unk>
  // probability estimate.
  uint64_t pruned_unigram_mass = 0;

  uint64_t count(const NGramKey &key) const;
};

// Incremental counter; merge order does not affect the result.
class NGramCounter {
 public:
  explicit NGramCounter(int order);  // throws OrderOutOfRange outside [1,4]
  void add(const NormalizedTranscript &sentence);
  NGramCounts take() { return std::move(counts_); }
  const NGramCounts &counts() const { return counts_; }

 private:
  NGramCounts counts_;
};

NGramCounts count_ngrams(const std::vector<NormalizedTranscript> &corpus,
                         int order);

struct PruneThresholds {
  uint64_t unigram_min = 10;
  uint64_t higher_order_min = 100;
};

// Count pruning on raw counts before estimation. Drops unigrams below
// unigram_min and higher-order n-grams below higher_order_min, then drops
// every n-gram containing a dropped word type or extending a dropped
// prefix. <s>, </s> and <unk> are structural and never pruned.
NGramCounts prune(const NGramCounts &counts, const PruneThresholds &t);

struct NGramEntry {
  double log10_prob = 0.0;
  double log10_backoff = 0.0;
};

// Backoff model in ARPA conventions: per-order (log10 prob, log10 backoff)
// entries. Immutable once estimated or read; concurrent queries need no
// coordination.
struct NGramModel {
  int order = 0;
  Vocab vocab;
  std::vector<NGramTable<NGramEntry>> tables;
  std::vector<std::string> warnings;

  const NGramEntry *find(const NGramKey &key) const;

  // ARPA backoff recursion over interned ids; context longer than order-1
  // is truncated to its last order-1 words.
  double score_ids(std::span<const uint32_t> context, uint32_t word) const;

  // OOV words (in context or target) map to <unk>.
  double score_word(std::span<const std::string> context,
                    const std::string &word) const;

  // Sum of per-word scores with <s> padding and </s> termination (log10).
  double sentence_logprob(const NormalizedTranscript &t) const;

  uint32_t map_token(const std::string &token) const;
  size_t vocabulary_size() const { return tables.empty() ? 0 : tables[0].size(); }
};

// Interpolated modified Kneser-Ney with backoff weights; falls back to
// absolute discounting (D=0.75) for any order whose count-of-counts are
// degenerate. An order left empty by pruning reduces the model order and
// emits a warning. Throws DegenerateCounts when nothing at all survives.
NGramModel estimate(const NGramCounts &counts);

// Sum of P(w|context) over the full vocabulary; 1 within 1e-6 for any
// context of a well-formed model.
double conditional_mass(const NGramModel &model,
                        std::span<const std::string> context);

void write_arpa(const NGramModel &model, const std::string &path);
NGramModel read_arpa(const std::string &path, bool allow_high_order = false);

}  // namespace ctcfuse
