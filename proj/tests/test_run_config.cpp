// test_run_config.cpp
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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "corpsim/error.hpp"
#include "corpsim/run_config.hpp"

using namespace corpsim;

TEST_CASE("config survives a JSON round trip") {
  RunConfig c;
  c.tokenizer.lowercase = false;
  c.input_mode = InputMode::kRaw;
  c.lm_order = 3;
  c.sgns.dim = 40;
  c.continuation_epochs = 2;
  c.measures = {Measure::kPpl, Measure::kTvc};
  c.seed = 99;
  c.token_cap = 5000;
  c.output_format = OutputFormat::kCsv;
  const RunConfig back = run_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.digest() == c.digest());
}

TEST_CASE("digest ignores cache location and output format only") {
  RunConfig a;
  RunConfig b;
  b.cache_dir = "/elsewhere";
  b.output_format = OutputFormat::kCsv;
  CHECK(a.digest() == b.digest());
  b.seed = 2;
  CHECK(a.digest() != b.digest());
  b = a;
  b.token_cap = 10;
  CHECK(a.digest() != b.digest());
  b = a;
  b.tokenizer.split_punctuation = false;
  CHECK(a.digest() != b.digest());
}

TEST_CASE("the seed drives the embedding seed") {
  RunConfig c;
  c.seed = 1234;
  CHECK(c.similarity().sgns.seed == 1234);
}

TEST_CASE("partial configs keep defaults and unknown keys are rejected") {
  const auto c = run_config_from_json(nlohmann::json::parse(R"({"lm": {"order": 4}, "seed": 7})"));
  CHECK(c.lm_order == 4);
  CHECK(c.seed == 7);
  CHECK(c.sgns.dim == 100);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"lm": {"orde": 4}})")), Error);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"colour": 1})")), Error);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"lm": {"order": 0}})")), Error);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"measures": ["bleu"]})")), Error);
  CHECK_THROWS_AS(run_config_from_json(nlohmann::json::parse(R"({"measures": []})")), Error);
}

TEST_CASE("cache directory falls back to the environment") {
  RunConfig c;
  ::setenv(kCacheDirEnv, "/tmp/from-env", 1);
  apply_environment(c);
  CHECK(c.cache_dir == "/tmp/from-env");
  RunConfig explicit_dir;
  explicit_dir.cache_dir = "/tmp/explicit";
  apply_environment(explicit_dir);
  CHECK(explicit_dir.cache_dir == "/tmp/explicit");
  ::unsetenv(kCacheDirEnv);
}

TEST_CASE("corpus loading applies tokenizer, mode and cap") {
  const auto dir = std::filesystem::temp_directory_path() / "corpsim-load";
  std::filesystem::create_directories(dir);
  const auto path = dir / "notes.txt";
  write_file(path, "One two. Three four!\nFive six\n");
  RunConfig c;
  CHECK(load_corpus(path, c).sentence_count() == 2);
  CHECK(load_corpus(path, c).id() == "notes");
  c.input_mode = InputMode::kRaw;
  CHECK(load_corpus(path, c, "x").sentence_count() == 3);
  c.token_cap = 3;
  CHECK(load_corpus(path, c).token_count() <= 3);

  write_file(path, "bad \xFF byte\n");
  CHECK_THROWS_AS(load_corpus(path, RunConfig{}), Error);
  write_file(path, "overlong \xC0\xAF\n");
  CHECK_THROWS_AS(load_corpus(path, RunConfig{}), Error);
  write_file(path, "fine \xC3\xA9t\xC3\xA9\n");
  CHECK(load_corpus(path, RunConfig{}).token_count() == 2);
  CHECK_THROWS_AS(load_corpus(dir / "missing.txt", RunConfig{}), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("lexicon files feed the content filter") {
  const auto path = std::filesystem::temp_directory_path() / "corpsim-lexicon.txt";
  write_file(path, "The\nOF\n");
  RunConfig c;
  c.content_filter = path.string();
  const auto f = c.make_content_filter();
  CHECK(f.exclusion_lexicon().size() == 2);
  CHECK(f.exclusion_lexicon().contains("of"));
  c.content_filter = "pos";
  CHECK(c.make_content_filter().mode() == ContentWordFilter::Mode::kExternalPosTags);
  std::filesystem::remove(path);
}
