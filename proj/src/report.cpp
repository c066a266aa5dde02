// report.cpp
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

#include "corpsim/report_io.hpp"

#include <cstdio>

#include "corpsim/error.hpp"

namespace corpsim {
namespace {

nlohmann::json opt(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

std::string csv_cell(const std::optional<double>& v) {
  if (!v) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

}  // namespace

nlohmann::json scores_to_json(const SimilarityScores& s) {
  return {
      {"source", s.source_id},      {"target", s.target_id},
      {"ppl_mean", opt(s.ppl_mean)}, {"ppl_sum", opt(s.ppl_sum)},
      {"ppl_oov_rate", opt(s.ppl_oov_rate)},
      {"wvv", opt(s.wvv)},          {"tvc", opt(s.tvc)},
      {"tvcc", opt(s.tvcc)},        {"config_digest", s.config_digest},
  };
}

SimilarityScores scores_from_json(const nlohmann::json& j) {
  try {
    SimilarityScores s;
    s.source_id = j.at("source").get<std::string>();
    s.target_id = j.at("target").get<std::string>();
    s.ppl_mean = opt_from(j, "ppl_mean");
    s.ppl_sum = opt_from(j, "ppl_sum");
    s.ppl_oov_rate = opt_from(j, "ppl_oov_rate");
    s.wvv = opt_from(j, "wvv");
    s.tvc = opt_from(j, "tvc");
    s.tvcc = opt_from(j, "tvcc");
    s.config_digest = j.at("config_digest").get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed score record: ") + e.what());
  }
}

nlohmann::json report_to_json(const SimilarityReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : report.scores) rows.push_back(scores_to_json(s));
  nlohmann::json rankings = nlohmann::json::object();
  for (const auto& [m, r] : report.rankings) {
    rankings[std::string(measure_name(m))] = {
        {"order", r.order},
        {"direction", lower_is_more_similar(m) ? "ascending" : "descending"},
        {"ties", r.ties},
    };
  }
  return {{"target", report.target_id},
          {"scores", rows},
          {"rankings", rankings},
          {"disagreements", report.disagreements}};
}

std::string reports_to_csv(std::span<const SimilarityReport> reports) {
  std::string out = std::string(kReportCsvHeader) + "\n";
  for (const auto& report : reports) {
    for (const auto& s : report.scores) {
      out += s.target_id + ',' + s.source_id + ',' + csv_cell(s.ppl_mean) + ',' +
             csv_cell(s.ppl_sum) + ',' + csv_cell(s.wvv) + ',' + csv_cell(s.tvc) + ',' +
             csv_cell(s.tvcc) + ',' + s.config_digest + '\n';
    }
  }
  return out;
}

}  // namespace corpsim
