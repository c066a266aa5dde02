// ngram_lm.hpp
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
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpsim/corpus.hpp"

namespace corpsim {

// char32_t so that n-grams can be stored as std::u32string keys.
using WordId = char32_t;
/// An n-gram as a sequence of word ids, oldest word first.
using NGram = std::u32string;

inline constexpr WordId kBos = 0;
inline constexpr WordId kEos = 1;
inline constexpr WordId kUnk = 2;
inline constexpr std::string_view kBosToken = "<s>";
inline constexpr std::string_view kEosToken = "</s>";
inline constexpr std::string_view kUnkToken = "<unk>";

/// Word inventory of a language model. Ids 0..2 are BOS, EOS and UNK.
class LmVocabulary {
 public:
  LmVocabulary();
  /// Adds `words` after the reserved tokens, skipping duplicates and reserved names.
  explicit LmVocabulary(std::span<const std::string> words);

  WordId add(std::string_view word);
  /// kUnk for unknown words.
  WordId lookup(std::string_view word) const;
  bool contains(std::string_view word) const;
  const std::string& word(WordId id) const { return words_.at(id); }
  std::size_t size() const noexcept { return words_.size(); }
  /// Number of events a distribution ranges over: every id except BOS.
  std::size_t predictable_size() const noexcept { return words_.size() - 1; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordId> index_;
};

/// Raw and continuation n-gram counts for orders 1..order. Index k-1 holds
/// k-grams. Continuation counts (distinct left extensions) exist for k < order.
struct NGramCountTable {
  int order = 0;
  LmVocabulary vocab;
  std::vector<std::unordered_map<NGram, std::uint64_t>> raw_counts;
  std::vector<std::unordered_map<NGram, std::uint64_t>> continuation_counts;
  /// n1..n4 of the counts each order is estimated from.
  std::vector<std::array<std::uint64_t, 4>> count_of_counts;
  std::uint64_t token_count = 0;
  std::uint64_t sentence_count = 0;

  /// Raw counts for the highest order, continuation counts below it.
  const std::unordered_map<NGram, std::uint64_t>& adjusted(int k) const {
    return k == order ? raw_counts[k - 1] : continuation_counts[k - 1];
  }
};

/// Counts every n-gram of length 1..order ending at a predicted position.
/// Sentences are padded with order-1 BOS ids and one EOS. `prune_min_count`
/// drops raw n-grams of length >= 2 seen fewer times before continuation
/// counts are derived. Throws on an empty corpus.
NGramCountTable count_ngrams(const Corpus& corpus, int order = 5,
                             std::uint64_t prune_min_count = 1);

struct Discounts {
  double d1 = 0.5;
  double d2 = 1.0;
  double d3plus = 1.5;

  double operator()(std::uint64_t count) const noexcept {
    return count == 0 ? 0.0 : count == 1 ? d1 : count == 2 ? d2 : d3plus;
  }
  friend bool operator==(const Discounts&, const Discounts&) = default;
};

inline constexpr Discounts kFallbackDiscounts{0.5, 1.0, 1.5};
/// Lower bound applied to every discount so the interpolation weight of a
/// context never vanishes.
inline constexpr double kMinDiscount = 1e-6;

struct DiscountSet {
  std::vector<Discounts> per_order;  // index k-1
};

/// Modified Kneser-Ney discounts from n1..n4. A discount whose formula
/// involves a zero count-of-count takes its fallback value.
Discounts discounts_from_count_of_counts(const std::array<std::uint64_t, 4>& n);
DiscountSet estimate_discounts(const NGramCountTable& counts);

/// Interpolated modified Kneser-Ney model stored in back-off form: every seen
/// n-gram holds its interpolated log10 probability, every context its log10
/// interpolation weight. Immutable after construction.
class KNModel {
 public:
  struct Entry {
    double log10_prob = 0.0;
    double log10_backoff = 0.0;
    bool has_prob = false;  // false for context-only entries such as BOS runs
  };
  using EntryTable = std::unordered_map<NGram, Entry>;

  KNModel(int order, LmVocabulary vocab, std::vector<EntryTable> entries);

  int order() const noexcept { return order_; }
  const LmVocabulary& vocab() const noexcept { return vocab_; }
  /// Entries of k-grams, k in 1..order.
  const EntryTable& entries(int k) const { return entries_.at(k - 1); }

  /// log10 p(word | context). Only the last order-1 ids of the context are used.
  double log10_prob(std::span<const WordId> context, WordId word) const;
  double prob(std::span<const WordId> context, WordId word) const;

  /// Largest |sum_w p(w | h) - 1| over every stored context h and the empty
  /// context, summing over all predictable ids.
  double max_normalization_error() const;

 private:
  int order_;
  LmVocabulary vocab_;
  std::vector<EntryTable> entries_;
};

inline constexpr double kNormalizationTolerance = 1e-6;

/// Throws if any conditional distribution is off by more than 1e-6.
KNModel estimate_model(const NGramCountTable& counts, const DiscountSet& discounts);

/// count_ngrams + estimate_discounts + estimate_model.
KNModel train_lm(const Corpus& corpus, int order = 5, std::uint64_t prune_min_count = 1);

struct SentenceScore {
  double log10_prob = 0.0;
  std::size_t length = 0;  // tokens + EOS
  std::size_t oov_count = 0;
};

/// Scores tokens plus EOS from a BOS-padded history. Unknown tokens are UNK.
SentenceScore score_sentence(const KNModel& model, std::span<const std::string> sentence);

struct SentencePerplexity {
  std::size_t index = 0;
  double perplexity = 0.0;
  std::size_t length = 0;
  std::size_t oov_count = 0;
};

struct PerplexityResult {
  std::vector<SentencePerplexity> per_sentence;
  double summed_ppl = 0.0;  // sum of per-sentence perplexities
  double mean_ppl = 0.0;    // summed_ppl / sentence count
  double oov_rate = 0.0;    // OOV tokens / tokens, EOS excluded
};

PerplexityResult perplexity(const KNModel& model, const Corpus& target);

}  // namespace corpsim
