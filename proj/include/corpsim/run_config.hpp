// run_config.hpp
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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include "corpsim/corpus.hpp"
#include "corpsim/measures.hpp"

namespace corpsim {

enum class OutputFormat { kJson, kCsv };

inline constexpr const char* kCacheDirEnv = "CORPSIM_CACHE_DIR";

/// Everything a run depends on. The seed drives SGNS and token-cap sampling.
struct RunConfig {
  TokenizerConfig tokenizer;
  InputMode input_mode = InputMode::kLinePerSentence;
  int lm_order = 5;
  std::uint64_t lm_prune_min_count = 1;
  SgnsHyperParams sgns;
  std::optional<int> continuation_epochs;
  std::set<Measure> measures{std::begin(kAllMeasures), std::end(kAllMeasures)};
  /// "default", "pos" (external tags) or the path of a one-word-per-line lexicon.
  std::string content_filter = "default";
  std::uint64_t seed = 1;
  std::uint64_t token_cap = 0;  // 0: no cap
  std::string cache_dir;
  OutputFormat output_format = OutputFormat::kJson;

  /// Throws Error on out-of-range values.
  void validate() const;
  SimilarityConfig similarity() const;
  ContentWordFilter make_content_filter() const;

  /// Covers every field that changes results; cache_dir and output_format
  /// are excluded.
  std::string canonical() const;
  std::string digest() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies the cache-directory environment variable when cache_dir is unset.
void apply_environment(RunConfig& config);

std::string_view input_mode_name(InputMode mode);
InputMode parse_input_mode(std::string_view name);
std::string_view output_format_name(OutputFormat format);
OutputFormat parse_output_format(std::string_view name);

/// Reads a text file as a corpus under the config's tokenizer, input mode
/// and token cap. The id defaults to the file stem.
Corpus load_corpus(const std::filesystem::path& path, const RunConfig& config,
                   std::string id = {});

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace corpsim
