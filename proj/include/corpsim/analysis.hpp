// analysis.hpp
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
#include <array>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "corpsim/error.hpp"
#include "corpsim/measures.hpp"

namespace corpsim {

/// One (target, source) pair with its similarity values and downstream F1
/// improvements. Score tables read from similarity reports leave the deltas NaN.
struct FixtureRow {
  std::string target;
  std::string source;
  double ppl = NAN;
  double wvv = NAN;
  double tvc = NAN;
  double tvcc = NAN;
  double delta_wv = NAN;
  double delta_lm = NAN;

  double value(Measure m) const;
};

inline constexpr const char* kFixtureCsvHeader =
    "target,source,ppl,wvv,tvc,tvcc,delta_wv,delta_lm";

/// The bundled 30-row table: 6 NER targets x 5 pretraining sources.
std::string_view bundled_fixture_csv();
std::vector<FixtureRow> bundled_fixture();

/// Parses either the fixture schema or the similarity report CSV schema
/// (ppl_mean feeds ppl; deltas stay NaN). Leading "#" lines are skipped.
/// Throws ParseError with row numbers.
std::vector<FixtureRow> parse_score_csv(std::string_view text);

/// Groups rows by target (first-appearance order) as score records, ready
/// for rank_sources. Absent values stay empty.
std::vector<std::pair<std::string, std::vector<SimilarityScores>>> scores_by_target(
    std::span<const FixtureRow> rows);

enum class TiePolicy { kReject, kExclude };

/// Pairwise question "which of two sources is more similar to the target".
struct BinaryComparison {
  std::string target_id;
  std::string source_a;  // source_a < source_b
  std::string source_b;
  std::map<Measure, std::string> verdicts;  // winning source id per measure
};

/// One comparison per target per unordered source pair, in target order of
/// first appearance. Ties throw under kReject and drop the pair under kExclude.
std::vector<BinaryComparison> enumerate_comparisons(std::span<const FixtureRow> rows,
                                                    std::span<const Measure> measures,
                                                    TiePolicy policy = TiePolicy::kReject);

struct AgreementResult {
  double kappa = 0.0;
  double observed = 0.0;  // mean per-item agreement
  double expected = 0.0;  // chance agreement
  std::size_t n_items = 0;
  std::size_t n_raters = 0;
  std::size_t n_categories = 0;
};

/// Fleiss's kappa from an items x categories table of rater counts. Every row
/// must sum to the same number of raters (>= 2).
AgreementResult fleiss_kappa(const Eigen::MatrixXi& counts);

/// Kappa over comparisons with two categories: source_a wins / source_b wins.
AgreementResult fleiss_kappa(std::span<const BinaryComparison> comparisons,
                             std::span<const Measure> raters);

/// Sample Pearson product-moment correlation.
template <typename Scalar>
double pearson(std::span<const Scalar> xs, std::span<const Scalar> ys) {
  if (xs.size() != ys.size()) throw Error("pearson: length mismatch");
  if (xs.size() < 3) throw Error("pearson: needs at least 3 pairs");
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Map<const Vec> x(xs.data(), static_cast<Eigen::Index>(xs.size()));
  const Eigen::Map<const Vec> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  const Eigen::VectorXd dx = (x.array() - x.mean()).matrix().template cast<double>();
  const Eigen::VectorXd dy = (y.array() - y.mean()).matrix().template cast<double>();
  const double sx = dx.norm();
  const double sy = dy.norm();
  if (sx == 0.0 || sy == 0.0) throw Error("pearson: zero variance");
  return std::clamp(dx.dot(dy) / (sx * sy), -1.0, 1.0);
}

inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  return pearson<double>(std::span<const double>(xs), std::span<const double>(ys));
}

enum class Downstream { kWordVectors, kLanguageModels };

std::string_view downstream_name(Downstream d);

struct CorrelationResult {
  Measure measure;
  Downstream downstream;
  double r = 0.0;
  std::size_t n = 0;
  std::string scope = "pooled";  // or a target id
};

/// Pooled Pearson r over all rows for every measure x downstream column (8 cells).
std::vector<CorrelationResult> predictiveness_table(std::span<const FixtureRow> rows);

/// The same 8 cells computed within each target separately.
std::vector<CorrelationResult> per_target_correlations(std::span<const FixtureRow> rows);

struct ReferenceCorrelation {
  Measure measure;
  Downstream downstream;
  double r;
};

/// Reference predictiveness coefficients the pooled table is compared against.
inline constexpr std::array<ReferenceCorrelation, 8> kReferenceCorrelations{{
    {Measure::kTvc, Downstream::kWordVectors, 0.454},
    {Measure::kTvc, Downstream::kLanguageModels, 0.666},
    {Measure::kTvcc, Downstream::kWordVectors, 0.469},
    {Measure::kTvcc, Downstream::kLanguageModels, 0.739},
    {Measure::kPpl, Downstream::kWordVectors, -0.398},
    {Measure::kPpl, Downstream::kLanguageModels, -0.618},
    {Measure::kWvv, Downstream::kWordVectors, -0.406},
    {Measure::kWvv, Downstream::kLanguageModels, -0.747},
}};

inline constexpr double kCorrelationTolerance = 0.05;
inline constexpr double kReferenceKappa = 0.733;
inline constexpr double kKappaTolerance = 0.005;

double reference_correlation(Measure m, Downstream d);

}  // namespace corpsim
