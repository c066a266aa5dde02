// run_config.cpp
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

#include "corpsim/run_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "corpsim/digest.hpp"
#include "corpsim/error.hpp"

namespace corpsim {
namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                std::string_view where) {
  if (!j.is_object()) throw Error(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || item.key() == a;
    if (!ok) throw Error("unknown config key '" + std::string(where) + "." + item.key() + "'");
  }
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

// UTF-8 well-formedness; overlong forms and surrogates are rejected.
bool valid_utf8(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t n = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      n = 1, cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      n = 2, cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      n = 3, cp = c & 0x07;
    } else {
      return false;
    }
    if (i + n >= s.size()) return false;
    for (std::size_t k = 1; k <= n; ++k) {
      const auto d = static_cast<unsigned char>(s[i + k]);
      if ((d & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (d & 0x3F);
    }
    static constexpr std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[n] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += n + 1;
  }
  return true;
}

}  // namespace

void RunConfig::validate() const {
  if (lm_order < 1) throw Error("lm order must be at least 1");
  if (lm_prune_min_count < 1) throw Error("lm prune count must be at least 1");
  if (sgns.dim < 1) throw Error("sgns dim must be positive");
  if (sgns.window < 1) throw Error("sgns window must be positive");
  if (sgns.negatives < 0) throw Error("sgns negatives must be non-negative");
  if (sgns.min_count < 1) throw Error("sgns min_count must be at least 1");
  if (!(sgns.initial_lr > 0.0)) throw Error("sgns learning rate must be positive");
  if (sgns.epochs < 0) throw Error("sgns epochs must be non-negative");
  if (continuation_epochs && *continuation_epochs < 0)
    throw Error("continuation epochs must be non-negative");
  if (measures.empty()) throw Error("no measures selected");
}

ContentWordFilter RunConfig::make_content_filter() const {
  if (content_filter == "default") return ContentWordFilter::default_lexicon();
  if (content_filter == "pos") return ContentWordFilter::external_pos_tags();
  std::unordered_set<std::string> words;
  std::istringstream in(read_file(content_filter));
  for (std::string line; std::getline(in, line);) {
    for (auto& t : tokenize(line, {tokenizer.lowercase, false})) words.insert(std::move(t));
  }
  return ContentWordFilter::lexicon(std::move(words), tokenizer);
}

SimilarityConfig RunConfig::similarity() const {
  SimilarityConfig c;
  c.lm_order = lm_order;
  c.lm_prune_min_count = lm_prune_min_count;
  c.sgns = sgns;
  c.sgns.seed = seed;
  c.continuation_epochs = continuation_epochs;
  c.measures = measures;
  c.content_filter = make_content_filter();
  return c;
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  out << "lowercase=" << tokenizer.lowercase << ";split_punct=" << tokenizer.split_punctuation
      << ";input=" << input_mode_name(input_mode) << ";token_cap=" << token_cap
      << ";seed=" << seed << ";" << similarity().canonical();
  return out.str();
}

std::string RunConfig::digest() const { return sha256_hex(canonical()); }

nlohmann::json to_json(const RunConfig& c) {
  json measures = json::array();
  for (Measure m : c.measures) measures.push_back(measure_name(m));
  return {
      {"tokenizer", {{"lowercase", c.tokenizer.lowercase},
                     {"split_punctuation", c.tokenizer.split_punctuation}}},
      {"input_mode", input_mode_name(c.input_mode)},
      {"lm", {{"order", c.lm_order}, {"prune_min_count", c.lm_prune_min_count}}},
      {"sgns", {{"dim", c.sgns.dim},
                {"window", c.sgns.window},
                {"negatives", c.sgns.negatives},
                {"subsample_threshold", c.sgns.subsample_threshold},
                {"min_count", c.sgns.min_count},
                {"initial_lr", c.sgns.initial_lr},
                {"epochs", c.sgns.epochs},
                {"continuation_epochs",
                 c.continuation_epochs ? json(*c.continuation_epochs) : json(nullptr)}}},
      {"measures", measures},
      {"content_filter", c.content_filter},
      {"seed", c.seed},
      {"token_cap", c.token_cap},
      {"cache_dir", c.cache_dir},
      {"output_format", output_format_name(c.output_format)},
  };
}

RunConfig run_config_from_json(const json& j, RunConfig c) {
  try {
    check_keys(j, {"tokenizer", "input_mode", "lm", "sgns", "measures", "content_filter", "seed",
                   "token_cap", "cache_dir", "output_format"},
               "config");
    if (j.contains("tokenizer")) {
      const auto& t = j.at("tokenizer");
      check_keys(t, {"lowercase", "split_punctuation"}, "tokenizer");
      read_key(t, "lowercase", c.tokenizer.lowercase);
      read_key(t, "split_punctuation", c.tokenizer.split_punctuation);
    }
    if (j.contains("input_mode")) c.input_mode = parse_input_mode(j.at("input_mode").get<std::string>());
    if (j.contains("lm")) {
      const auto& l = j.at("lm");
      check_keys(l, {"order", "prune_min_count"}, "lm");
      read_key(l, "order", c.lm_order);
      read_key(l, "prune_min_count", c.lm_prune_min_count);
    }
    if (j.contains("sgns")) {
      const auto& s = j.at("sgns");
      check_keys(s, {"dim", "window", "negatives", "subsample_threshold", "min_count", "initial_lr",
                     "epochs", "continuation_epochs"},
                 "sgns");
      read_key(s, "dim", c.sgns.dim);
      read_key(s, "window", c.sgns.window);
      read_key(s, "negatives", c.sgns.negatives);
      read_key(s, "subsample_threshold", c.sgns.subsample_threshold);
      read_key(s, "min_count", c.sgns.min_count);
      read_key(s, "initial_lr", c.sgns.initial_lr);
      read_key(s, "epochs", c.sgns.epochs);
      if (s.contains("continuation_epochs")) {
        const auto& e = s.at("continuation_epochs");
        c.continuation_epochs = e.is_null() ? std::nullopt : std::optional<int>(e.get<int>());
      }
    }
    if (j.contains("measures")) {
      c.measures.clear();
      for (const auto& m : j.at("measures")) c.measures.insert(parse_measure(m.get<std::string>()));
    }
    read_key(j, "content_filter", c.content_filter);
    read_key(j, "seed", c.seed);
    read_key(j, "token_cap", c.token_cap);
    read_key(j, "cache_dir", c.cache_dir);
    if (j.contains("output_format"))
      c.output_format = parse_output_format(j.at("output_format").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(std::string("invalid config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error("config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

void apply_environment(RunConfig& config) {
  if (!config.cache_dir.empty()) return;
  if (const char* dir = std::getenv(kCacheDirEnv)) config.cache_dir = dir;
}

std::string_view input_mode_name(InputMode mode) {
  return mode == InputMode::kRaw ? "raw" : "lines";
}

InputMode parse_input_mode(std::string_view name) {
  if (name == "lines") return InputMode::kLinePerSentence;
  if (name == "raw") return InputMode::kRaw;
  throw Error("unknown input mode '" + std::string(name) + "' (expected lines or raw)");
}

std::string_view output_format_name(OutputFormat format) {
  return format == OutputFormat::kCsv ? "csv" : "json";
}

OutputFormat parse_output_format(std::string_view name) {
  if (name == "json") return OutputFormat::kJson;
  if (name == "csv") return OutputFormat::kCsv;
  throw Error("unknown output format '" + std::string(name) + "' (expected json or csv)");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("read failed: " + path.string());
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed: " + path.string());
}

Corpus load_corpus(const std::filesystem::path& path, const RunConfig& config, std::string id) {
  const std::string text = read_file(path);
  if (!valid_utf8(text)) throw Error(path.string() + " is not valid UTF-8");
  if (id.empty()) id = path.stem().string();
  Corpus corpus = Corpus::from_text(std::move(id), text, config.input_mode, config.tokenizer,
                                    path.string());
  if (config.token_cap > 0) corpus = cap_tokens(corpus, config.token_cap, config.seed);
  return corpus;
}

}  // namespace corpsim
