// measures.hpp
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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpsim/corpus.hpp"
#include "corpsim/ngram_lm.hpp"
#include "corpsim/sgns.hpp"

namespace corpsim {

enum class Measure { kPpl, kWvv, kTvc, kTvcc };

inline constexpr Measure kAllMeasures[] = {Measure::kPpl, Measure::kWvv, Measure::kTvc,
                                           Measure::kTvcc};

std::string_view measure_name(Measure m);
/// Accepts "ppl", "wvv", "tvc", "tvcc" (case-insensitive).
Measure parse_measure(std::string_view name);
/// PPL and WVV: lower means more similar. TVC and TVcC: higher.
constexpr bool lower_is_more_similar(Measure m) {
  return m == Measure::kPpl || m == Measure::kWvv;
}

/// |V_S ∩ V_T| / |V_T|. Throws on an empty target vocabulary.
double target_vocab_covered(const Vocabulary& source, const Vocabulary& target);

/// Per-sentence POS tags aligned with a corpus' sentences.
using TagStream = std::vector<std::vector<std::string>>;

/// Vocabulary (min_count 1) of the content words in a corpus.
Vocabulary content_vocab(const Corpus& corpus, const ContentWordFilter& filter,
                         const TagStream* tags = nullptr);

/// Coverage restricted to content words. Tag streams are required in
/// external-POS mode and ignored otherwise.
double tvcc(const Corpus& source, const Corpus& target, const ContentWordFilter& filter,
            const TagStream* source_tags = nullptr, const TagStream* target_tags = nullptr);

struct SimilarityConfig {
  int lm_order = 5;
  std::uint64_t lm_prune_min_count = 1;
  SgnsHyperParams sgns;
  /// Epochs of the target continuation pass; defaults to sgns.epochs.
  std::optional<int> continuation_epochs;
  std::set<Measure> measures{std::begin(kAllMeasures), std::end(kAllMeasures)};
  ContentWordFilter content_filter = ContentWordFilter::default_lexicon();

  bool enabled(Measure m) const { return measures.contains(m); }
  SgnsHyperParams continuation_params() const;
  /// Canonical text of every field that influences scores.
  std::string canonical() const;
  std::string digest() const;
};

/// One row of scores for a (source, target) pair. Disabled measures stay empty.
struct SimilarityScores {
  std::string source_id;
  std::string target_id;
  std::optional<double> ppl_mean;
  std::optional<double> ppl_sum;
  std::optional<double> ppl_oov_rate;
  std::optional<double> wvv;
  std::optional<double> tvc;
  std::optional<double> tvcc;
  std::string config_digest;
  bool from_cache = false;

  /// PPL maps to ppl_mean.
  std::optional<double> value(Measure m) const;
};

/// Content-addressed store of source LMs, source embeddings and pair scores.
/// With an empty directory it is a process-local memo only. Thread-safe.
class ArtifactCache {
 public:
  struct Stats {
    std::size_t lm_hits = 0, lm_misses = 0;
    std::size_t vectors_hits = 0, vectors_misses = 0;
    std::size_t score_hits = 0, score_misses = 0;
  };

  explicit ArtifactCache(std::filesystem::path dir = {});

  /// Trains on a miss. The returned model is always the ARPA round trip of
  /// the trained one, so cached and fresh runs score identically.
  std::shared_ptr<const KNModel> language_model(const Corpus& source, const SimilarityConfig& config);
  std::shared_ptr<const Embeddings> source_vectors(const Corpus& source, const SimilarityConfig& config);

  std::optional<SimilarityScores> find_scores(const std::string& key);
  void store_scores(const std::string& key, const SimilarityScores& scores);

  const std::filesystem::path& directory() const noexcept { return dir_; }
  Stats stats() const;

  static std::string lm_key(const Corpus& source, const SimilarityConfig& config);
  static std::string vectors_key(const Corpus& source, const SimilarityConfig& config);
  static std::string scores_key(const Corpus& source, const Corpus& target,
                                const SimilarityConfig& config);

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const KNModel>> lms_;
  std::map<std::string, std::shared_ptr<const Embeddings>> vectors_;
  std::map<std::string, SimilarityScores> scores_;
  Stats stats_;
};

/// Trains the source LM and embeddings, continues on the target, and computes
/// every enabled measure. Failures are rethrown as MeasureError.
SimilarityScores compute_similarity(const Corpus& source, const Corpus& target,
                                    const SimilarityConfig& config, ArtifactCache& cache);

struct Ranking {
  Measure measure;
  std::vector<std::string> order;  // most similar first
  /// Groups of sources with equal scores, each in lexicographic order.
  std::vector<std::vector<std::string>> ties;
};

/// Sorts by the measure's similarity direction; ties by source id.
/// Throws on empty input, mixed targets or a missing measure value.
Ranking rank_sources(std::span<const SimilarityScores> scores, Measure measure);

struct SimilarityReport {
  std::string target_id;
  std::vector<SimilarityScores> scores;
  std::map<Measure, Ranking> rankings;
  /// Human-readable notes where measures disagree on the most similar source.
  std::vector<std::string> disagreements;
};

SimilarityReport build_report(const Corpus& target, std::span<const Corpus> sources,
                              const SimilarityConfig& config, ArtifactCache& cache);

}  // namespace corpsim
