// report_io.hpp
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

#include <json.hpp>

#include <span>
#include <string>

#include "corpsim/measures.hpp"

namespace corpsim {

/// Missing optional values serialize as null. Doubles round-trip exactly.
nlohmann::json scores_to_json(const SimilarityScores& scores);
SimilarityScores scores_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const SimilarityReport& report);

inline constexpr const char* kReportCsvHeader =
    "target,source,ppl_mean,ppl_sum,wvv,tvc,tvcc,config_digest";

/// One row per (target, source); empty cells for skipped measures.
std::string reports_to_csv(std::span<const SimilarityReport> reports);

}  // namespace corpsim
