// arpa.hpp
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
#include <string>
#include <string_view>

#include "corpsim/ngram_lm.hpp"

namespace corpsim {

/// Log probability written for context-only entries (BOS runs), as in
/// common ARPA practice for <s>.
inline constexpr double kArpaNoProb = -99.0;

/// Serializes the model in ARPA back-off format. Output is deterministic.
std::string export_arpa(const KNModel& model);

/// Parses ARPA text. Throws ParseError with the offending line number.
KNModel import_arpa(std::string_view text);

void write_arpa(const KNModel& model, const std::filesystem::path& path);
KNModel read_arpa(const std::filesystem::path& path);

}  // namespace corpsim
