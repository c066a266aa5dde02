// ngram_lm.cpp
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

#include "corpsim/ngram_lm.hpp"

#include <algorithm>
#include <cmath>

#include "corpsim/error.hpp"

namespace corpsim {
namespace {

NGram context_of(const NGram& g) { return g.substr(0, g.size() - 1); }

struct ContextStats {
  std::uint64_t total = 0;
  std::uint64_t n1 = 0;
  std::uint64_t n2 = 0;
  std::uint64_t n3plus = 0;

  void add(std::uint64_t a) {
    total += a;
    if (a == 1) ++n1;
    else if (a == 2) ++n2;
    else if (a >= 3) ++n3plus;
  }
  double gamma(const Discounts& d) const {
    return (d.d1 * n1 + d.d2 * n2 + d.d3plus * n3plus) / static_cast<double>(total);
  }
};

double clamp_discount(double d, double count_class) {
  return std::clamp(d, kMinDiscount, std::nextafter(count_class, 0.0));
}

}  // namespace

LmVocabulary::LmVocabulary() {
  for (auto w : {kBosToken, kEosToken, kUnkToken}) add(w);
}

LmVocabulary::LmVocabulary(std::span<const std::string> words) : LmVocabulary() {
  for (const auto& w : words) add(w);
}

WordId LmVocabulary::add(std::string_view word) {
  const auto it = index_.find(std::string(word));
  if (it != index_.end()) return it->second;
  const auto id = static_cast<WordId>(words_.size());
  words_.emplace_back(word);
  index_.emplace(words_.back(), id);
  return id;
}

WordId LmVocabulary::lookup(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

bool LmVocabulary::contains(std::string_view word) const {
  return index_.contains(std::string(word));
}

NGramCountTable count_ngrams(const Corpus& corpus, int order, std::uint64_t prune_min_count) {
  if (order < 1) throw Error("n-gram order must be at least 1");
  if (corpus.empty()) throw Error("cannot count n-grams of an empty corpus");

  NGramCountTable t;
  t.order = order;
  t.raw_counts.resize(order);
  t.continuation_counts.resize(order);
  t.count_of_counts.assign(order, {0, 0, 0, 0});
  t.token_count = corpus.token_count();
  t.sentence_count = corpus.sentence_count();

  // Sorted word list gives ids independent of hash iteration order.
  std::vector<std::string> words;
  for (const auto& s : corpus.sentences()) words.insert(words.end(), s.begin(), s.end());
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  t.vocab = LmVocabulary(words);

  std::vector<WordId> padded;
  for (const auto& s : corpus.sentences()) {
    padded.assign(order - 1, kBos);
    for (const auto& w : s) padded.push_back(t.vocab.lookup(w));
    padded.push_back(kEos);
    for (std::size_t i = order - 1; i < padded.size(); ++i) {
      for (int k = 1; k <= order; ++k) {
        ++t.raw_counts[k - 1][NGram(padded.begin() + (i + 1 - k), padded.begin() + (i + 1))];
      }
    }
  }

  if (prune_min_count > 1) {
    for (int k = 2; k <= order; ++k) {
      std::erase_if(t.raw_counts[k - 1],
                    [&](const auto& kv) { return kv.second < prune_min_count; });
    }
  }

  for (int k = 1; k < order; ++k) {
    auto& cont = t.continuation_counts[k - 1];
    for (const auto& [g, c] : t.raw_counts[k]) ++cont[g.substr(1)];
  }

  for (int k = 1; k <= order; ++k) {
    for (const auto& [g, a] : t.adjusted(k)) {
      if (a >= 1 && a <= 4) ++t.count_of_counts[k - 1][a - 1];
    }
  }
  return t;
}

Discounts discounts_from_count_of_counts(const std::array<std::uint64_t, 4>& n) {
  Discounts d = kFallbackDiscounts;
  const double n1 = static_cast<double>(n[0]);
  const double n2 = static_cast<double>(n[1]);
  const double n3 = static_cast<double>(n[2]);
  const double n4 = static_cast<double>(n[3]);
  if (n[0] == 0 || n[1] == 0) return d;
  const double y = n1 / (n1 + 2.0 * n2);
  d.d1 = clamp_discount(1.0 - 2.0 * y * n2 / n1, 1.0);
  if (n[2] == 0) return d;
  d.d2 = clamp_discount(2.0 - 3.0 * y * n3 / n2, 2.0);
  if (n[3] == 0) return d;
  d.d3plus = clamp_discount(3.0 - 4.0 * y * n4 / n3, 3.0);
  return d;
}

DiscountSet estimate_discounts(const NGramCountTable& counts) {
  DiscountSet set;
  for (const auto& n : counts.count_of_counts) set.per_order.push_back(discounts_from_count_of_counts(n));
  return set;
}

KNModel::KNModel(int order, LmVocabulary vocab, std::vector<EntryTable> entries)
    : order_(order), vocab_(std::move(vocab)), entries_(std::move(entries)) {
  if (order_ < 1 || static_cast<int>(entries_.size()) != order_)
    throw Error("model entry tables do not match its order");
}

double KNModel::log10_prob(std::span<const WordId> context, WordId word) const {
  const std::size_t len = std::min(context.size(), static_cast<std::size_t>(order_ - 1));
  const auto tail = context.last(len);
  double backoff = 0.0;
  for (std::size_t j = len;; --j) {
    NGram g(tail.end() - j, tail.end());
    g.push_back(word);
    const auto& table = entries_[j];
    if (const auto it = table.find(g); it != table.end() && it->second.has_prob)
      return backoff + it->second.log10_prob;
    if (j == 0) break;
    g.pop_back();
    const auto& ctx_table = entries_[j - 1];
    if (const auto it = ctx_table.find(g); it != ctx_table.end()) backoff += it->second.log10_backoff;
  }
  throw Error("word '" + (word < vocab_.size() ? vocab_.word(word) : std::to_string(word)) +
              "' has no unigram probability");
}

double KNModel::prob(std::span<const WordId> context, WordId word) const {
  return std::pow(10.0, log10_prob(context, word));
}

double KNModel::max_normalization_error() const {
  const auto predictable_prob = [&](std::span<const WordId> ctx, WordId w) {
    try {
      return prob(ctx, w);
    } catch (const Error&) {
      return 0.0;
    }
  };
  double unigram_sum = 0.0;
  for (WordId w = 1; w < vocab_.size(); ++w) unigram_sum += predictable_prob({}, w);
  double worst = std::abs(unigram_sum - 1.0);

  for (int k = 2; k <= order_; ++k) {
    struct Sums {
      double seen = 0.0;
      double lower = 0.0;
    };
    std::unordered_map<NGram, Sums> sums;
    for (const auto& [g, e] : entries_[k - 1]) {
      if (!e.has_prob) continue;
      auto& s = sums[context_of(g)];
      s.seen += std::pow(10.0, e.log10_prob);
      const NGram shorter = g.substr(1, g.size() - 2);
      s.lower += predictable_prob(std::span<const WordId>(shorter.data(), shorter.size()), g.back());
    }
    for (const auto& [h, s] : sums) {
      double backoff = 0.0;
      if (const auto it = entries_[k - 2].find(h); it != entries_[k - 2].end())
        backoff = std::pow(10.0, it->second.log10_backoff);
      worst = std::max(worst, std::abs(s.seen + backoff * (1.0 - s.lower) - 1.0));
    }
  }
  return worst;
}

KNModel estimate_model(const NGramCountTable& counts, const DiscountSet& discounts) {
  const int order = counts.order;
  if (static_cast<int>(discounts.per_order.size()) != order)
    throw Error("discount set does not match the count table order");
  const auto& vocab = counts.vocab;
  const double uniform = 1.0 / static_cast<double>(vocab.predictable_size());

  std::vector<KNModel::EntryTable> entries(order);
  // Lower-order tables are final before a higher order reads them.
  const auto query = [&](const NGram& ctx, WordId w, int max_order) {
    // Back-off walk over orders 1..max_order; mirrors KNModel::log10_prob.
    const std::size_t len = std::min(ctx.size(), static_cast<std::size_t>(max_order - 1));
    double backoff = 0.0;
    for (std::size_t j = len;; --j) {
      NGram g = ctx.substr(ctx.size() - j);
      g.push_back(w);
      if (const auto it = entries[j].find(g); it != entries[j].end() && it->second.has_prob)
        return std::pow(10.0, backoff + it->second.log10_prob);
      if (j == 0) break;
      g.pop_back();
      if (const auto it = entries[j - 1].find(g); it != entries[j - 1].end())
        backoff += it->second.log10_backoff;
    }
    throw Error("internal: missing lower-order probability");
  };

  for (int k = 1; k <= order; ++k) {
    const auto& adj = counts.adjusted(k);
    const Discounts& d = discounts.per_order[k - 1];
    std::unordered_map<NGram, ContextStats> stats;
    for (const auto& [g, a] : adj) stats[context_of(g)].add(a);

    auto& table = entries[k - 1];
    const auto add_prob = [&](const NGram& g, double p) {
      if (!(p > 0.0) || !std::isfinite(p))
        throw Error("non-positive probability while estimating order " + std::to_string(k));
      auto& e = table[g];
      e.log10_prob = std::log10(p);
      e.has_prob = true;
    };

    if (k == 1) {
      const auto it = stats.find(NGram{});
      const ContextStats st = it == stats.end() ? ContextStats{} : it->second;
      const double gamma = st.total ? st.gamma(d) : 1.0;
      for (WordId w = 1; w < vocab.size(); ++w) {
        const NGram g(1, w);
        const auto a_it = adj.find(g);
        const std::uint64_t a = a_it == adj.end() ? 0 : a_it->second;
        const double seen = st.total ? std::max(a - d(a), 0.0) / st.total : 0.0;
        add_prob(g, seen + gamma * uniform);
      }
      continue;
    }

    for (const auto& [g, a] : adj) {
      if (a == 0) continue;
      const ContextStats& st = stats.at(context_of(g));
      const double gamma = st.gamma(d);
      const double lower = query(g.substr(1, g.size() - 2), g.back(), k - 1);
      add_prob(g, std::max(a - d(a), 0.0) / st.total + gamma * lower);
    }
    auto& ctx_table = entries[k - 2];
    for (const auto& [h, st] : stats) {
      if (st.total == 0) continue;
      ctx_table[h].log10_backoff = std::log10(st.gamma(d));
    }
  }

  KNModel model(order, vocab, std::move(entries));
  const double err = model.max_normalization_error();
  if (!(err <= kNormalizationTolerance))
    throw Error("conditional distribution off by " + std::to_string(err) + " after estimation");
  return model;
}

KNModel train_lm(const Corpus& corpus, int order, std::uint64_t prune_min_count) {
  const auto counts = count_ngrams(corpus, order, prune_min_count);
  return estimate_model(counts, estimate_discounts(counts));
}

SentenceScore score_sentence(const KNModel& model, std::span<const std::string> sentence) {
  if (sentence.empty()) throw Error("cannot score an empty sentence");
  const auto& vocab = model.vocab();
  const std::size_t history = static_cast<std::size_t>(model.order() - 1);
  std::vector<WordId> ids(history, kBos);
  ids.reserve(history + sentence.size() + 1);
  SentenceScore score;
  const auto step = [&](WordId w) {
    score.log10_prob += model.log10_prob(std::span<const WordId>(ids).last(history), w);
    ids.push_back(w);
    ++score.length;
  };
  for (const auto& token : sentence) {
    const WordId w = vocab.lookup(token);
    if (w == kUnk) ++score.oov_count;
    step(w);
  }
  step(kEos);
  return score;
}

PerplexityResult perplexity(const KNModel& model, const Corpus& target) {
  if (target.empty()) throw Error("cannot evaluate perplexity on an empty corpus");
  PerplexityResult r;
  std::size_t oov = 0;
  for (std::size_t i = 0; i < target.sentence_count(); ++i) {
    const auto s = score_sentence(model, target.sentences()[i]);
    const double ppl = std::pow(10.0, -s.log10_prob / static_cast<double>(s.length));
    r.per_sentence.push_back({i, ppl, s.length, s.oov_count});
    r.summed_ppl += ppl;
    oov += s.oov_count;
  }
  r.mean_ppl = r.summed_ppl / static_cast<double>(target.sentence_count());
  r.oov_rate = static_cast<double>(oov) / static_cast<double>(target.token_count());
  return r;
}

}  // namespace corpsim
