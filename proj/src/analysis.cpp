// analysis.cpp
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

#include "corpsim/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "corpsim/report_io.hpp"

namespace corpsim {
namespace {

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

double parse_cell(std::string_view cell, std::size_t line, bool allow_empty) {
  if (cell.empty()) {
    if (allow_empty) return NAN;
    throw ParseError("empty numeric cell", line);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
    throw ParseError("expected a number, got '" + std::string(cell) + "'", line);
  return v;
}

}  // namespace

double FixtureRow::value(Measure m) const {
  switch (m) {
    case Measure::kPpl: return ppl;
    case Measure::kWvv: return wvv;
    case Measure::kTvc: return tvc;
    case Measure::kTvcc: return tvcc;
  }
  return NAN;
}

std::vector<FixtureRow> bundled_fixture() { return parse_score_csv(bundled_fixture_csv()); }

std::vector<FixtureRow> parse_score_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < text.size();) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  std::size_t head = 0;
  while (head < lines.size() && lines[head].starts_with('#')) ++head;
  if (head == lines.size()) throw ParseError("empty CSV", head + 1);

  const bool fixture = lines[head] == kFixtureCsvHeader;
  const bool report = lines[head] == kReportCsvHeader;
  if (!fixture && !report)
    throw ParseError("unrecognized header '" + std::string(lines[head]) + "'", head + 1);

  std::vector<FixtureRow> rows;
  for (std::size_t i = head + 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (lines[i].empty()) continue;
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 8)
      throw ParseError("expected 8 columns, found " + std::to_string(cells.size()), line_no);
    if (cells[0].empty() || cells[1].empty()) throw ParseError("empty target or source", line_no);
    FixtureRow r;
    r.target = std::string(cells[0]);
    r.source = std::string(cells[1]);
    if (fixture) {
      r.ppl = parse_cell(cells[2], line_no, false);
      r.wvv = parse_cell(cells[3], line_no, false);
      r.tvc = parse_cell(cells[4], line_no, false);
      r.tvcc = parse_cell(cells[5], line_no, false);
      r.delta_wv = parse_cell(cells[6], line_no, false);
      r.delta_lm = parse_cell(cells[7], line_no, false);
    } else {
      r.ppl = parse_cell(cells[2], line_no, true);
      parse_cell(cells[3], line_no, true);  // ppl_sum
      r.wvv = parse_cell(cells[4], line_no, true);
      r.tvc = parse_cell(cells[5], line_no, true);
      r.tvcc = parse_cell(cells[6], line_no, true);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<std::pair<std::string, std::vector<SimilarityScores>>> scores_by_target(
    std::span<const FixtureRow> rows) {
  const auto opt = [](double v) { return std::isnan(v) ? std::nullopt : std::optional<double>(v); };
  std::vector<std::pair<std::string, std::vector<SimilarityScores>>> out;
  std::map<std::string, std::size_t> slot;
  for (const auto& r : rows) {
    auto [it, inserted] = slot.try_emplace(r.target, out.size());
    if (inserted) out.push_back({r.target, {}});
    SimilarityScores s;
    s.source_id = r.source;
    s.target_id = r.target;
    s.ppl_mean = opt(r.ppl);
    s.wvv = opt(r.wvv);
    s.tvc = opt(r.tvc);
    s.tvcc = opt(r.tvcc);
    out[it->second].second.push_back(std::move(s));
  }
  return out;
}

std::vector<BinaryComparison> enumerate_comparisons(std::span<const FixtureRow> rows,
                                                    std::span<const Measure> measures,
                                                    TiePolicy policy) {
  if (measures.empty()) throw Error("no measures to compare");
  std::vector<std::string> targets;
  std::map<std::string, std::vector<const FixtureRow*>> by_target;
  for (const auto& r : rows) {
    auto [it, inserted] = by_target.try_emplace(r.target);
    if (inserted) targets.push_back(r.target);
    it->second.push_back(&r);
  }

  std::vector<BinaryComparison> out;
  for (const auto& target : targets) {
    auto group = by_target.at(target);
    if (group.size() < 2) throw Error("target '" + target + "' has fewer than 2 sources");
    std::sort(group.begin(), group.end(),
              [](const FixtureRow* a, const FixtureRow* b) { return a->source < b->source; });
    for (std::size_t i = 0; i + 1 < group.size(); ++i) {
      if (group[i]->source == group[i + 1]->source)
        throw Error("target '" + target + "' lists source '" + group[i]->source + "' twice");
    }
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const FixtureRow& a = *group[i];
        const FixtureRow& b = *group[j];
        BinaryComparison c{target, a.source, b.source, {}};
        bool tied = false;
        for (Measure m : measures) {
          const double va = a.value(m);
          const double vb = b.value(m);
          if (std::isnan(va) || std::isnan(vb))
            throw Error("missing " + std::string(measure_name(m)) + " value for target '" +
                        target + "'");
          if (va == vb) {
            if (policy == TiePolicy::kReject)
              throw Error("tie on " + std::string(measure_name(m)) + " for " + target + ": " +
                          a.source + " vs " + b.source);
            tied = true;
            break;
          }
          const bool a_wins = lower_is_more_similar(m) ? va < vb : va > vb;
          c.verdicts.emplace(m, a_wins ? a.source : b.source);
        }
        if (!tied) out.push_back(std::move(c));
      }
    }
  }
  return out;
}

AgreementResult fleiss_kappa(const Eigen::MatrixXi& counts) {
  if (counts.rows() == 0) throw Error("fleiss kappa needs at least one item");
  if (counts.cols() < 2) throw Error("fleiss kappa needs at least two categories");
  if ((counts.array() < 0).any()) throw Error("fleiss kappa counts must be non-negative");
  const Eigen::VectorXi per_item = counts.rowwise().sum();
  const int n = per_item(0);
  if (n < 2) throw Error("fleiss kappa needs at least two raters");
  if ((per_item.array() != n).any()) throw Error("every item needs the same number of ratings");

  const Eigen::MatrixXd c = counts.cast<double>();
  const double items = static_cast<double>(counts.rows());
  const Eigen::VectorXd agreement =
      (c.array().square().rowwise().sum() - n) / (static_cast<double>(n) * (n - 1));
  const Eigen::RowVectorXd p = c.colwise().sum() / (items * n);

  AgreementResult r;
  r.observed = agreement.mean();
  r.expected = p.squaredNorm();
  r.n_items = static_cast<std::size_t>(counts.rows());
  r.n_raters = static_cast<std::size_t>(n);
  r.n_categories = static_cast<std::size_t>(counts.cols());
  if (r.expected >= 1.0) {
    // Every rating falls in one category; kappa is conventionally 1.
    r.kappa = 1.0;
  } else {
    r.kappa = (r.observed - r.expected) / (1.0 - r.expected);
  }
  return r;
}

AgreementResult fleiss_kappa(std::span<const BinaryComparison> comparisons,
                             std::span<const Measure> raters) {
  if (raters.size() < 2) throw Error("fleiss kappa needs at least two raters");
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(comparisons.size()), 2);
  for (std::size_t i = 0; i < comparisons.size(); ++i) {
    const auto& c = comparisons[i];
    for (Measure m : raters) {
      const auto it = c.verdicts.find(m);
      if (it == c.verdicts.end())
        throw Error("comparison " + c.target_id + ": " + c.source_a + " vs " + c.source_b +
                    " has no " + std::string(measure_name(m)) + " verdict");
      ++counts(static_cast<Eigen::Index>(i), it->second == c.source_a ? 0 : 1);
    }
  }
  return fleiss_kappa(counts);
}

std::string_view downstream_name(Downstream d) {
  return d == Downstream::kWordVectors ? "delta_wv" : "delta_lm";
}

namespace {

std::vector<CorrelationResult> correlate_rows(std::span<const FixtureRow* const> rows,
                                              const std::string& scope) {
  std::vector<CorrelationResult> out;
  for (Measure m : {Measure::kTvc, Measure::kTvcc, Measure::kPpl, Measure::kWvv}) {
    for (Downstream d : {Downstream::kWordVectors, Downstream::kLanguageModels}) {
      std::vector<double> xs, ys;
      for (const FixtureRow* r : rows) {
        const double x = r->value(m);
        const double y = d == Downstream::kWordVectors ? r->delta_wv : r->delta_lm;
        if (std::isnan(x) || std::isnan(y))
          throw Error("incomplete row for " + r->target + "/" + r->source);
        xs.push_back(x);
        ys.push_back(y);
      }
      out.push_back({m, d, pearson(xs, ys), xs.size(), scope});
    }
  }
  return out;
}

}  // namespace

std::vector<CorrelationResult> predictiveness_table(std::span<const FixtureRow> rows) {
  if (rows.size() < 3) throw Error("predictiveness needs at least 3 rows");
  std::vector<const FixtureRow*> all;
  for (const auto& r : rows) all.push_back(&r);
  return correlate_rows(all, "pooled");
}

std::vector<CorrelationResult> per_target_correlations(std::span<const FixtureRow> rows) {
  std::vector<std::string> targets;
  std::map<std::string, std::vector<const FixtureRow*>> by_target;
  for (const auto& r : rows) {
    auto [it, inserted] = by_target.try_emplace(r.target);
    if (inserted) targets.push_back(r.target);
    it->second.push_back(&r);
  }
  std::vector<CorrelationResult> out;
  for (const auto& t : targets) {
    const auto part = correlate_rows(by_target.at(t), t);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

double reference_correlation(Measure m, Downstream d) {
  for (const auto& c : kReferenceCorrelations)
    if (c.measure == m && c.downstream == d) return c.r;
  throw Error("no reference correlation for this cell");
}

}  // namespace corpsim
