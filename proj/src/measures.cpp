// measures.cpp
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

#include "corpsim/measures.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "corpsim/arpa.hpp"
#include "corpsim/digest.hpp"
#include "corpsim/embedding_io.hpp"
#include "corpsim/error.hpp"
#include "corpsim/report_io.hpp"

namespace corpsim {
namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Write to a sibling temp file then rename, so readers never see partial data.
void write_atomically(const std::filesystem::path& path, std::string_view data) {
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
  }
  std::filesystem::rename(tmp, path);
}

std::string sgns_canonical(const SgnsHyperParams& hp) {
  std::ostringstream out;
  out.precision(17);
  out << "dim=" << hp.dim << ";window=" << hp.window << ";negatives=" << hp.negatives
      << ";sample=" << hp.subsample_threshold << ";min_count=" << hp.min_count
      << ";lr=" << hp.initial_lr << ";epochs=" << hp.epochs << ";seed=" << hp.seed
      << ";mode=single-worker";
  return out.str();
}

template <typename F>
auto labeled(Measure m, F&& f) {
  try {
    return f();
  } catch (const MeasureError&) {
    throw;
  } catch (const std::exception& e) {
    throw MeasureError(std::string(measure_name(m)), e.what());
  }
}

}  // namespace

std::string_view measure_name(Measure m) {
  switch (m) {
    case Measure::kPpl: return "ppl";
    case Measure::kWvv: return "wvv";
    case Measure::kTvc: return "tvc";
    case Measure::kTvcc: return "tvcc";
  }
  return "?";
}

Measure parse_measure(std::string_view name) {
  const auto n = lowercase(name);
  for (Measure m : kAllMeasures)
    if (measure_name(m) == n) return m;
  throw Error("unknown measure '" + std::string(name) + "'");
}

double target_vocab_covered(const Vocabulary& source, const Vocabulary& target) {
  if (target.empty()) throw Error("target vocabulary is empty");
  std::size_t shared = 0;
  for (const auto& t : target.tokens())
    if (source.contains(t)) ++shared;
  return static_cast<double>(shared) / static_cast<double>(target.size());
}

Vocabulary content_vocab(const Corpus& corpus, const ContentWordFilter& filter,
                         const TagStream* tags) {
  const bool external = filter.mode() == ContentWordFilter::Mode::kExternalPosTags;
  if (external && (!tags || tags->size() != corpus.sentence_count()))
    throw Error("external POS mode needs one tag sequence per sentence");
  std::vector<Sentence> kept;
  kept.reserve(corpus.sentence_count());
  for (std::size_t i = 0; i < corpus.sentence_count(); ++i) {
    const auto& s = corpus.sentences()[i];
    kept.push_back(external ? filter_content_words(s, filter, (*tags)[i])
                            : filter_content_words(s, filter));
  }
  return build_vocab(Corpus(corpus.id(), std::move(kept)), 1);
}

double tvcc(const Corpus& source, const Corpus& target, const ContentWordFilter& filter,
            const TagStream* source_tags, const TagStream* target_tags) {
  const Vocabulary vt = content_vocab(target, filter, target_tags);
  if (vt.empty()) throw Error("target has no content words after filtering");
  return target_vocab_covered(content_vocab(source, filter, source_tags), vt);
}

SgnsHyperParams SimilarityConfig::continuation_params() const {
  SgnsHyperParams hp = sgns;
  if (continuation_epochs) hp.epochs = *continuation_epochs;
  return hp;
}

std::string SimilarityConfig::canonical() const {
  std::ostringstream out;
  out << "lm_order=" << lm_order << ";lm_prune=" << lm_prune_min_count << ";sgns{"
      << sgns_canonical(sgns) << "};continuation_epochs=" << continuation_params().epochs
      << ";measures=";
  for (Measure m : measures) out << measure_name(m) << ',';
  out << ";filter=";
  if (content_filter.mode() == ContentWordFilter::Mode::kExternalPosTags) {
    out << "external";
  } else {
    std::vector<std::string> words(content_filter.exclusion_lexicon().begin(),
                                   content_filter.exclusion_lexicon().end());
    std::sort(words.begin(), words.end());
    std::string joined;
    for (const auto& w : words) joined += w + '\n';
    out << "lexicon:" << sha256_hex(joined);
  }
  return out.str();
}

std::string SimilarityConfig::digest() const { return sha256_hex(canonical()); }

std::optional<double> SimilarityScores::value(Measure m) const {
  switch (m) {
    case Measure::kPpl: return ppl_mean;
    case Measure::kWvv: return wvv;
    case Measure::kTvc: return tvc;
    case Measure::kTvcc: return tvcc;
  }
  return std::nullopt;
}

ArtifactCache::ArtifactCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string ArtifactCache::lm_key(const Corpus& source, const SimilarityConfig& config) {
  return sha256_hex("lm|" + source.digest() + "|order=" + std::to_string(config.lm_order) +
                    "|prune=" + std::to_string(config.lm_prune_min_count));
}

std::string ArtifactCache::vectors_key(const Corpus& source, const SimilarityConfig& config) {
  return sha256_hex("wv|" + source.digest() + "|" + sgns_canonical(config.sgns));
}

std::string ArtifactCache::scores_key(const Corpus& source, const Corpus& target,
                                      const SimilarityConfig& config) {
  return sha256_hex("pair|" + source.digest() + "|" + target.digest() + "|" + config.digest());
}

ArtifactCache::Stats ArtifactCache::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

std::shared_ptr<const KNModel> ArtifactCache::language_model(const Corpus& source,
                                                             const SimilarityConfig& config) {
  const std::string key = lm_key(source, config);
  std::lock_guard lock(mutex_);
  if (const auto it = lms_.find(key); it != lms_.end()) {
    ++stats_.lm_hits;
    return it->second;
  }
  const auto path = dir_.empty() ? std::filesystem::path{} : dir_ / "lm" / (key + ".arpa");
  std::shared_ptr<const KNModel> model;
  if (!path.empty() && std::filesystem::exists(path)) {
    ++stats_.lm_hits;
    model = std::make_shared<const KNModel>(import_arpa(read_file(path)));
  } else {
    ++stats_.lm_misses;
    const std::string arpa =
        export_arpa(train_lm(source, config.lm_order, config.lm_prune_min_count));
    if (!path.empty()) write_atomically(path, arpa);
    model = std::make_shared<const KNModel>(import_arpa(arpa));
  }
  lms_.emplace(key, model);
  return model;
}

std::shared_ptr<const Embeddings> ArtifactCache::source_vectors(const Corpus& source,
                                                                const SimilarityConfig& config) {
  const std::string key = vectors_key(source, config);
  std::lock_guard lock(mutex_);
  if (const auto it = vectors_.find(key); it != vectors_.end()) {
    ++stats_.vectors_hits;
    return it->second;
  }
  const auto path = dir_.empty() ? std::filesystem::path{} : dir_ / "wv" / (key + ".bin");
  std::shared_ptr<const Embeddings> emb;
  if (!path.empty() && std::filesystem::exists(path)) {
    ++stats_.vectors_hits;
    emb = std::make_shared<const Embeddings>(from_embedding_binary(read_file(path)));
  } else {
    ++stats_.vectors_misses;
    auto trained = std::make_shared<const Embeddings>(train<float>(source, config.sgns));
    if (!path.empty()) {
      write_atomically(path, to_embedding_binary(*trained));
      write_atomically(dir_ / "wv" / (key + ".vec"), to_word_vector_text(*trained));
    }
    emb = std::move(trained);
  }
  vectors_.emplace(key, emb);
  return emb;
}

std::optional<SimilarityScores> ArtifactCache::find_scores(const std::string& key) {
  std::lock_guard lock(mutex_);
  if (const auto it = scores_.find(key); it != scores_.end()) {
    ++stats_.score_hits;
    return it->second;
  }
  if (!dir_.empty()) {
    const auto path = dir_ / "scores" / (key + ".json");
    if (std::filesystem::exists(path)) {
      ++stats_.score_hits;
      auto s = scores_from_json(nlohmann::json::parse(read_file(path)));
      scores_.emplace(key, s);
      return s;
    }
  }
  ++stats_.score_misses;
  return std::nullopt;
}

void ArtifactCache::store_scores(const std::string& key, const SimilarityScores& scores) {
  std::lock_guard lock(mutex_);
  scores_.insert_or_assign(key, scores);
  if (!dir_.empty())
    write_atomically(dir_ / "scores" / (key + ".json"), scores_to_json(scores).dump(2) + "\n");
}

SimilarityScores compute_similarity(const Corpus& source, const Corpus& target,
                                    const SimilarityConfig& config, ArtifactCache& cache) {
  const std::string key = ArtifactCache::scores_key(source, target, config);
  if (auto cached = cache.find_scores(key)) {
    cached->source_id = source.id();
    cached->target_id = target.id();
    cached->from_cache = true;
    return *cached;
  }

  SimilarityScores s;
  s.source_id = source.id();
  s.target_id = target.id();
  s.config_digest = config.digest();

  if (config.enabled(Measure::kTvc)) {
    s.tvc = labeled(Measure::kTvc,
                    [&] { return target_vocab_covered(build_vocab(source, 1), build_vocab(target, 1)); });
  }
  if (config.enabled(Measure::kTvcc)) {
    s.tvcc = labeled(Measure::kTvcc, [&] { return tvcc(source, target, config.content_filter); });
  }
  if (config.enabled(Measure::kPpl)) {
    const auto ppl = labeled(Measure::kPpl, [&] {
      return perplexity(*cache.language_model(source, config), target);
    });
    s.ppl_mean = ppl.mean_ppl;
    s.ppl_sum = ppl.summed_ppl;
    s.ppl_oov_rate = ppl.oov_rate;
  }
  if (config.enabled(Measure::kWvv)) {
    s.wvv = labeled(Measure::kWvv, [&] {
      const auto ws = cache.source_vectors(source, config);
      const auto wt = continue_training(*ws, target, config.continuation_params());
      return word_vector_variance(*ws, wt).value;
    });
  }
  cache.store_scores(key, s);
  return s;
}

Ranking rank_sources(std::span<const SimilarityScores> scores, Measure measure) {
  if (scores.empty()) throw Error("cannot rank an empty score list");
  const std::string& target = scores.front().target_id;
  std::vector<std::pair<double, std::string>> keyed;
  for (const auto& s : scores) {
    if (s.target_id != target)
      throw Error("scores mix targets '" + target + "' and '" + s.target_id + "'");
    const auto v = s.value(measure);
    if (!v) throw Error("source '" + s.source_id + "' has no " + std::string(measure_name(measure)));
    keyed.emplace_back(lower_is_more_similar(measure) ? *v : -*v, s.source_id);
  }
  std::sort(keyed.begin(), keyed.end());
  Ranking r{measure, {}, {}};
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    r.order.push_back(keyed[i].second);
    if (i > 0 && keyed[i].first == keyed[i - 1].first) {
      if (r.ties.empty() || r.ties.back().back() != keyed[i - 1].second)
        r.ties.push_back({keyed[i - 1].second});
      r.ties.back().push_back(keyed[i].second);
    }
  }
  return r;
}

SimilarityReport build_report(const Corpus& target, std::span<const Corpus> sources,
                              const SimilarityConfig& config, ArtifactCache& cache) {
  if (sources.empty()) throw Error("a report needs at least one source");
  SimilarityReport report;
  report.target_id = target.id();
  for (const auto& source : sources)
    report.scores.push_back(compute_similarity(source, target, config, cache));
  for (Measure m : config.measures) report.rankings.emplace(m, rank_sources(report.scores, m));

  for (const auto& [m, r] : report.rankings) {
    for (const auto& [m2, r2] : report.rankings) {
      if (m2 <= m || r.order.front() == r2.order.front()) continue;
      report.disagreements.push_back(std::string(measure_name(m)) + " ranks " + r.order.front() +
                                     " first, " + std::string(measure_name(m2)) + " ranks " +
                                     r2.order.front() + " first");
    }
  }
  return report;
}

}  // namespace corpsim
