// sgns.hpp
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

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

#include "corpsim/corpus.hpp"
#include "corpsim/error.hpp"

namespace corpsim {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Skip-gram with negative sampling settings. Defaults follow word2vec; the
/// epoch count of 5 is an assumption and is recorded in every report.
struct SgnsHyperParams {
  int dim = 100;
  int window = 5;
  int negatives = 5;
  double subsample_threshold = 1e-3;
  std::uint64_t min_count = 5;
  double initial_lr = 0.025;
  int epochs = 5;
  std::uint64_t seed = 1;
};

inline constexpr double kLearningRateFloor = 1e-4;

/// Word vectors bound to a vocabulary. Row i of both tables belongs to
/// vocab.token(i).
template <typename Scalar = float>
struct EmbeddingMatrix {
  Vocabulary vocab;
  RowMatrix<Scalar> input;
  RowMatrix<Scalar> context;

  Eigen::Index rows() const noexcept { return input.rows(); }
  Eigen::Index dim() const noexcept { return input.cols(); }

  auto vector(std::string_view token) const {
    const auto id = vocab.id(token);
    if (id < 0) throw Error("unknown token '" + std::string(token) + "'");
    return input.row(id);
  }
};

using Embeddings = EmbeddingMatrix<float>;

/// Seeded initialization: input uniform in [-0.5/d, 0.5/d), context zero.
template <typename Scalar>
EmbeddingMatrix<Scalar> initialize_embeddings(Vocabulary vocab, int dim, std::uint64_t seed);

/// Trains on `corpus` with its own min_count vocabulary. Single-worker and
/// deterministic for a fixed seed.
template <typename Scalar = float>
EmbeddingMatrix<Scalar> train(const Corpus& corpus, const SgnsHyperParams& hp);

/// Continues training from `source` on `target` with the vocabulary frozen.
/// Target tokens outside the source vocabulary are dropped before windowing;
/// negatives and subsampling use target frequencies. The learning rate
/// restarts at hp.initial_lr.
template <typename Scalar = float>
EmbeddingMatrix<Scalar> continue_training(const EmbeddingMatrix<Scalar>& source,
                                          const Corpus& target, const SgnsHyperParams& hp);

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(-x));
}

/// log sigma(u_pos . v) + sum_k log sigma(-u_k . v)
template <typename Scalar>
Scalar sgns_objective(const RowVector<Scalar>& center, const RowVector<Scalar>& positive,
                      std::span<const RowVector<Scalar>> negatives) {
  Scalar value = std::log(sigmoid<Scalar>(positive.dot(center)));
  for (const auto& n : negatives) value += std::log(sigmoid<Scalar>(-n.dot(center)));
  return value;
}

/// One gradient-ascent step on sgns_objective for the given rows. Context rows
/// are updated with the pre-step center vector; the center row receives the
/// accumulated gradient afterwards. A negative equal to the positive is skipped.
template <typename Scalar>
void sgns_step(RowMatrix<Scalar>& input, RowMatrix<Scalar>& context, Eigen::Index center,
               Eigen::Index positive, std::span<const Eigen::Index> negatives, Scalar lr,
               RowVector<Scalar>& scratch) {
  auto v = input.row(center);
  scratch.setZero(input.cols());
  const auto apply = [&](Eigen::Index target, Scalar label) {
    auto u = context.row(target);
    const Scalar g = (label - sigmoid<Scalar>(u.dot(v))) * lr;
    scratch.noalias() += g * u;
    u.noalias() += g * v;
  };
  apply(positive, Scalar(1));
  for (const Eigen::Index n : negatives) {
    if (n != positive) apply(n, Scalar(0));
  }
  v += scratch;
}

struct WvvResult {
  double value = 0.0;
  std::size_t vocab_size = 0;
  std::size_t dim = 0;
};

/// Mean squared entrywise difference of the input tables.
template <typename Scalar>
WvvResult word_vector_variance(const EmbeddingMatrix<Scalar>& ws, const EmbeddingMatrix<Scalar>& wt) {
  if (ws.input.rows() != wt.input.rows() || ws.input.cols() != wt.input.cols())
    throw Error("word vector variance needs matrices of identical shape");
  if (ws.vocab.tokens() != wt.vocab.tokens())
    throw Error("word vector variance needs identical vocabulary bindings");
  if (ws.input.size() == 0) throw Error("word vector variance of an empty matrix");
  const double sum = (ws.input.template cast<double>() - wt.input.template cast<double>()).squaredNorm();
  return {sum / static_cast<double>(ws.input.size()), static_cast<std::size_t>(ws.rows()),
          static_cast<std::size_t>(ws.dim())};
}

template <typename Scalar>
double cosine_similarity(const EmbeddingMatrix<Scalar>& emb, std::string_view a, std::string_view b) {
  const RowVector<double> va = emb.vector(a).template cast<double>();
  const RowVector<double> vb = emb.vector(b).template cast<double>();
  const double na = va.norm();
  const double nb = vb.norm();
  if (na == 0.0 || nb == 0.0) throw Error("cosine similarity of a zero vector");
  return std::clamp(va.dot(vb) / (na * nb), -1.0, 1.0);
}

}  // namespace corpsim
