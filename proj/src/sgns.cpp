// sgns.cpp
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

#include "corpsim/sgns.hpp"

#include <algorithm>
#include <vector>

#include "corpsim/rng.hpp"

namespace corpsim {
namespace {

using IdSentence = std::vector<Eigen::Index>;

// Samples ids in proportion to count^0.75.
class NegativeSampler {
 public:
  explicit NegativeSampler(const std::vector<std::uint64_t>& counts) {
    cumulative_.reserve(counts.size());
    double total = 0.0;
    for (const auto c : counts) {
      total += c == 0 ? 0.0 : std::pow(static_cast<double>(c), 0.75);
      cumulative_.push_back(total);
    }
    if (!(total > 0.0)) throw Error("negative sampling distribution is empty");
  }

  Eigen::Index draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<Eigen::Index>(
        std::min<std::ptrdiff_t>(it - cumulative_.begin(), cumulative_.size() - 1));
  }

 private:
  std::vector<double> cumulative_;
};

struct TrainingData {
  std::vector<IdSentence> sentences;
  std::vector<std::uint64_t> counts;  // per vocabulary row, from this corpus
  std::uint64_t train_words = 0;
};

TrainingData map_corpus(const Corpus& corpus, const Vocabulary& vocab) {
  TrainingData data;
  data.counts.assign(vocab.size(), 0);
  for (const auto& s : corpus.sentences()) {
    IdSentence ids;
    ids.reserve(s.size());
    for (const auto& t : s) {
      const auto id = vocab.id(t);
      if (id < 0) continue;
      ids.push_back(id);
      ++data.counts[id];
    }
    data.train_words += ids.size();
    if (!ids.empty()) data.sentences.push_back(std::move(ids));
  }
  return data;
}

template <typename Scalar>
void run_sgd(EmbeddingMatrix<Scalar>& emb, const TrainingData& data, const SgnsHyperParams& hp,
             std::string_view stream_prefix) {
  if (hp.epochs <= 0) return;
  const NegativeSampler sampler(data.counts);
  Rng negative_rng = Rng::stream(hp.seed, std::string(stream_prefix) + "negatives");
  Rng window_rng = Rng::stream(hp.seed, std::string(stream_prefix) + "window");
  Rng subsample_rng = Rng::stream(hp.seed, std::string(stream_prefix) + "subsample");

  const double threshold = hp.subsample_threshold * static_cast<double>(data.train_words);
  std::vector<double> keep_prob(data.counts.size(), 1.0);
  if (hp.subsample_threshold > 0.0) {
    for (std::size_t i = 0; i < keep_prob.size(); ++i) {
      const double c = static_cast<double>(data.counts[i]);
      if (c > 0) keep_prob[i] = (std::sqrt(c / threshold) + 1.0) * threshold / c;
    }
  }

  const double schedule = static_cast<double>(hp.epochs) * static_cast<double>(data.train_words) + 1.0;
  std::uint64_t processed = 0;
  RowVector<Scalar> scratch(emb.dim());
  std::vector<Eigen::Index> negatives(static_cast<std::size_t>(std::max(hp.negatives, 0)));
  IdSentence kept;

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    for (const auto& sentence : data.sentences) {
      const double progress = static_cast<double>(processed) / schedule;
      const Scalar lr = static_cast<Scalar>(hp.initial_lr * std::max(1.0 - progress, kLearningRateFloor));
      processed += sentence.size();

      kept.clear();
      for (const auto id : sentence) {
        if (keep_prob[id] >= 1.0 || subsample_rng.uniform() < keep_prob[id]) kept.push_back(id);
      }
      const auto n = static_cast<std::ptrdiff_t>(kept.size());
      for (std::ptrdiff_t pos = 0; pos < n; ++pos) {
        const auto span = 1 + static_cast<std::ptrdiff_t>(window_rng.below(hp.window));
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, pos - span);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, pos + span);
        for (std::ptrdiff_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          for (auto& neg : negatives) neg = sampler.draw(negative_rng);
          sgns_step<Scalar>(emb.input, emb.context, kept[pos], kept[c], negatives, lr, scratch);
        }
      }
    }
  }
}

void validate(const SgnsHyperParams& hp) {
  if (hp.dim < 1) throw Error("embedding dimension must be positive");
  if (hp.window < 1) throw Error("window must be positive");
  if (hp.negatives < 1) throw Error("negatives must be positive");
  if (!(hp.initial_lr > 0.0)) throw Error("learning rate must be positive");
  if (hp.epochs < 0) throw Error("epochs must be non-negative");
}

}  // namespace

template <typename Scalar>
EmbeddingMatrix<Scalar> initialize_embeddings(Vocabulary vocab, int dim, std::uint64_t seed) {
  EmbeddingMatrix<Scalar> emb;
  const auto rows = static_cast<Eigen::Index>(vocab.size());
  emb.vocab = std::move(vocab);
  emb.input.resize(rows, dim);
  emb.context = RowMatrix<Scalar>::Zero(rows, dim);
  Rng rng = Rng::stream(seed, "init");
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      emb.input(i, j) = static_cast<Scalar>((rng.uniform() - 0.5) / dim);
  return emb;
}

template <typename Scalar>
EmbeddingMatrix<Scalar> train(const Corpus& corpus, const SgnsHyperParams& hp) {
  validate(hp);
  if (corpus.token_count() < static_cast<std::uint64_t>(hp.window))
    throw Error("corpus has fewer tokens than the window size");
  Vocabulary vocab = build_vocab(corpus, std::max<std::uint64_t>(hp.min_count, 1));
  if (vocab.empty()) throw Error("vocabulary is empty after applying min_count");
  const TrainingData data = map_corpus(corpus, vocab);
  auto emb = initialize_embeddings<Scalar>(std::move(vocab), hp.dim, hp.seed);
  run_sgd(emb, data, hp, "train/");
  return emb;
}

template <typename Scalar>
EmbeddingMatrix<Scalar> continue_training(const EmbeddingMatrix<Scalar>& source,
                                          const Corpus& target, const SgnsHyperParams& hp) {
  validate(hp);
  if (source.input.rows() != static_cast<Eigen::Index>(source.vocab.size()) ||
      source.context.rows() != source.input.rows() || source.context.cols() != source.input.cols())
    throw Error("source embeddings are inconsistent with their vocabulary");
  const TrainingData data = map_corpus(target, source.vocab);
  if (data.train_words == 0) throw Error("target shares no tokens with the source vocabulary");
  EmbeddingMatrix<Scalar> emb = source;
  run_sgd(emb, data, hp, "continue/");
  return emb;
}

template EmbeddingMatrix<float> initialize_embeddings<float>(Vocabulary, int, std::uint64_t);
template EmbeddingMatrix<double> initialize_embeddings<double>(Vocabulary, int, std::uint64_t);
template EmbeddingMatrix<float> train<float>(const Corpus&, const SgnsHyperParams&);
template EmbeddingMatrix<double> train<double>(const Corpus&, const SgnsHyperParams&);
template EmbeddingMatrix<float> continue_training<float>(const EmbeddingMatrix<float>&,
                                                         const Corpus&, const SgnsHyperParams&);
template EmbeddingMatrix<double> continue_training<double>(const EmbeddingMatrix<double>&,
                                                           const Corpus&, const SgnsHyperParams&);

}  // namespace corpsim
