// corpsim.cpp
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

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "corpsim/analysis.hpp"
#include "corpsim/arpa.hpp"
#include "corpsim/embedding_io.hpp"
#include "corpsim/error.hpp"
#include "corpsim/measures.hpp"
#include "corpsim/ngram_lm.hpp"
#include "corpsim/report_io.hpp"
#include "corpsim/run_config.hpp"
#include "corpsim/sgns.hpp"
#include "corpsim/version.hpp"

namespace {

using nlohmann::json;
using namespace corpsim;

// Flags that override RunConfig fields when given.
struct Overrides {
  std::string config_path;
  std::optional<bool> no_lowercase, no_split_punct;
  std::optional<std::string> input_mode;
  std::optional<int> lm_order;
  std::optional<std::uint64_t> lm_prune;
  std::optional<int> dim, window, negatives, epochs, continuation_epochs;
  std::optional<double> sample, lr;
  std::optional<std::uint64_t> min_count, seed, token_cap;
  std::optional<std::string> measures, content_filter, cache_dir, format;
};

void add_config_flags(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config_path, "JSON run configuration file")->check(CLI::ExistingFile);
  app.add_flag("--no-lowercase", o.no_lowercase, "Keep letter case");
  app.add_flag("--no-split-punct", o.no_split_punct, "Keep punctuation attached to words");
  app.add_option("--input-mode", o.input_mode, "lines or raw");
  app.add_option("--lm-order", o.lm_order, "N-gram order");
  app.add_option("--lm-prune", o.lm_prune, "Minimum count for n-grams of order >= 2");
  app.add_option("--dim", o.dim, "Embedding dimension");
  app.add_option("--window", o.window, "Maximum context window");
  app.add_option("--negatives", o.negatives, "Negative samples per positive pair");
  app.add_option("--sample", o.sample, "Subsampling threshold");
  app.add_option("--min-count", o.min_count, "SGNS vocabulary minimum count");
  app.add_option("--lr", o.lr, "Initial learning rate");
  app.add_option("--epochs", o.epochs, "SGNS epochs");
  app.add_option("--continuation-epochs", o.continuation_epochs, "Epochs of continuation training");
  app.add_option("--seed", o.seed, "Seed for every random stream");
  app.add_option("--token-cap", o.token_cap, "Sample corpora down to this many tokens (0: off)");
  app.add_option("--measures", o.measures, "Comma-separated subset of ppl,wvv,tvc,tvcc");
  app.add_option("--content-filter", o.content_filter, "default, pos, or a lexicon file");
  app.add_option("--cache-dir", o.cache_dir, "Artifact cache directory");
  app.add_option("--format", o.format, "json or csv");
}

json measure_names(const std::vector<Measure>& measures) {
  json out = json::array();
  for (Measure m : measures) out.push_back(measure_name(m));
  return out;
}

// "ppl,wvv" -> {kPpl, kWvv}; empty items are skipped.
std::vector<Measure> parse_measure_list(std::string_view csv) {
  std::vector<Measure> out;
  while (!csv.empty()) {
    const auto comma = csv.find(',');
    const auto item = csv.substr(0, comma);
    if (!item.empty()) out.push_back(parse_measure(item));
    csv = comma == std::string_view::npos ? std::string_view{} : csv.substr(comma + 1);
  }
  return out;
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : load_run_config(o.config_path);
  if (o.no_lowercase && *o.no_lowercase) c.tokenizer.lowercase = false;
  if (o.no_split_punct && *o.no_split_punct) c.tokenizer.split_punctuation = false;
  if (o.input_mode) c.input_mode = parse_input_mode(*o.input_mode);
  if (o.lm_order) c.lm_order = *o.lm_order;
  if (o.lm_prune) c.lm_prune_min_count = *o.lm_prune;
  if (o.dim) c.sgns.dim = *o.dim;
  if (o.window) c.sgns.window = *o.window;
  if (o.negatives) c.sgns.negatives = *o.negatives;
  if (o.sample) c.sgns.subsample_threshold = *o.sample;
  if (o.min_count) c.sgns.min_count = *o.min_count;
  if (o.lr) c.sgns.initial_lr = *o.lr;
  if (o.epochs) c.sgns.epochs = *o.epochs;
  if (o.continuation_epochs) c.continuation_epochs = *o.continuation_epochs;
  if (o.seed) c.seed = *o.seed;
  if (o.token_cap) c.token_cap = *o.token_cap;
  if (o.measures) {
    const auto listed = parse_measure_list(*o.measures);
    c.measures = {listed.begin(), listed.end()};
  }
  if (o.content_filter) c.content_filter = *o.content_filter;
  if (o.cache_dir) c.cache_dir = *o.cache_dir;
  if (o.format) c.output_format = parse_output_format(*o.format);
  apply_environment(c);
  c.validate();
  return c;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json stamped(json body, const RunConfig& config) {
  body["tool_version"] = kToolVersion;
  body["config_digest"] = config.digest();
  return body;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_file(out_path, text);
  }
}

void emit_json(const json& j, const std::string& out_path) { emit(j.dump(2) + "\n", out_path); }

void warn(const std::string& message) { std::cerr << "warning: " << message << "\n"; }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

TagStream read_tags(const std::string& path) {
  TagStream tags;
  const std::string text = read_file(path);
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const auto line = std::string_view(text).substr(start, end - start);
    auto row = tokenize(line, {false, false});
    if (!row.empty()) tags.push_back(std::move(row));
    start = end + 1;
  }
  return tags;
}

// Reads a fixture CSV, a report CSV or a report JSON file.
std::vector<FixtureRow> load_rows(const std::string& path) {
  if (path.empty()) return bundled_fixture();
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') return parse_score_csv(text);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
  const json& report = j.contains("report") ? j.at("report") : j;
  if (!report.contains("scores")) throw Error(path + ": no scores array");
  std::vector<FixtureRow> rows;
  for (const auto& item : report.at("scores")) {
    const SimilarityScores s = scores_from_json(item);
    FixtureRow r;
    r.target = s.target_id;
    r.source = s.source_id;
    r.ppl = s.ppl_mean.value_or(NAN);
    r.wvv = s.wvv.value_or(NAN);
    r.tvc = s.tvc.value_or(NAN);
    r.tvcc = s.tvcc.value_or(NAN);
    rows.push_back(std::move(r));
  }
  return rows;
}

json correlation_json(const CorrelationResult& c) {
  return {{"measure", measure_name(c.measure)},
          {"downstream", downstream_name(c.downstream)},
          {"r", number_or_null(c.r)},
          {"n", c.n},
          {"scope", c.scope}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Corpus similarity measures for choosing pretraining data"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Overrides overrides;
  add_config_flags(app, overrides);
  std::string out_path;
  app.add_option("-o,--output", out_path, "Output file (default: stdout)");

  std::function<int()> action;

  auto* ingest = app.add_subcommand("ingest", "Tokenize a corpus and print its manifest");
  std::string ingest_path, ingest_id;
  ingest->add_option("path", ingest_path, "UTF-8 text file")->required()->check(CLI::ExistingFile);
  ingest->add_option("--id", ingest_id, "Corpus id (default: file stem)");
  ingest->callback([&] {
    action = [&] {
      const RunConfig config = resolve(overrides);
      const Corpus corpus = load_corpus(ingest_path, config, ingest_id);
      if (corpus.token_count() == 0) warn(ingest_path + " contains no tokens");
      const CorpusManifest m = manifest(corpus);
      emit_json(stamped({{"id", m.id},
                         {"source", corpus.source_descriptor()},
                         {"token_count", m.token_count},
                         {"sentence_count", m.sentence_count},
                         {"type_count", build_vocab(corpus).size()},
                         {"sha256", m.sha256}},
                        config),
                out_path);
      return 0;
    };
  });

  auto* lm_train = app.add_subcommand("lm-train", "Train a modified Kneser-Ney LM and write ARPA");
  std::string lm_corpus;
  lm_train->add_option("corpus", lm_corpus, "Training corpus")->required()->check(CLI::ExistingFile);
  lm_train->callback([&] {
    action = [&] {
      if (out_path.empty()) throw Error("lm-train needs --output for the ARPA file");
      const RunConfig config = resolve(overrides);
      const Corpus corpus = load_corpus(lm_corpus, config);
      const KNModel model = train_lm(corpus, config.lm_order, config.lm_prune_min_count);
      write_file(out_path, "# corpsim " + std::string(kToolVersion) + " config " +
                               config.digest() + "\n" + export_arpa(model));
      json counts = json::array();
      for (int k = 1; k <= model.order(); ++k) counts.push_back(model.entries(k).size());
      std::cout << stamped({{"corpus", corpus.id()},
                            {"order", model.order()},
                            {"ngram_counts", counts},
                            {"model", out_path}},
                           config)
                       .dump(2)
                << "\n";
      return 0;
    };
  });

  auto* ppl = app.add_subcommand("ppl", "Perplexity of a target corpus under an ARPA model");
  std::string ppl_model, ppl_target;
  bool per_sentence = false;
  ppl->add_option("--model", ppl_model, "ARPA model")->required()->check(CLI::ExistingFile);
  ppl->add_option("target", ppl_target, "Target corpus")->required()->check(CLI::ExistingFile);
  ppl->add_flag("--per-sentence", per_sentence, "Include every sentence's perplexity");
  ppl->callback([&] {
    action = [&] {
      const RunConfig config = resolve(overrides);
      const KNModel model = read_arpa(ppl_model);
      const Corpus target = load_corpus(ppl_target, config);
      const PerplexityResult r = perplexity(model, target);
      json body = {{"model", ppl_model},       {"target", target.id()},
                   {"mean_ppl", r.mean_ppl},   {"summed_ppl", r.summed_ppl},
                   {"oov_rate", r.oov_rate},   {"sentence_count", r.per_sentence.size()}};
      if (per_sentence) {
        json rows = json::array();
        for (const auto& s : r.per_sentence)
          rows.push_back({{"index", s.index}, {"perplexity", s.perplexity},
                          {"length", s.length}, {"oov_count", s.oov_count}});
        body["per_sentence"] = rows;
      }
      emit_json(stamped(body, config), out_path);
      return 0;
    };
  });

  // Embedding outputs: ".bin" selects the exact binary cache format, anything
  // else the word-vector text format. A JSON sidecar records the provenance.
  const auto write_vectors = [&](const Embeddings& emb, const RunConfig& config, json info) {
    if (out_path.empty()) throw Error("--output is required for embeddings");
    if (std::filesystem::path(out_path).extension() == ".bin") {
      write_embedding_binary(emb, out_path);
    } else {
      write_word_vectors(emb, out_path);
    }
    info["vocab_size"] = emb.rows();
    info["dim"] = emb.dim();
    info["vectors"] = out_path;
    const json meta = stamped(info, config);
    write_file(out_path + ".json", meta.dump(2) + "\n");
    std::cout << meta.dump(2) << "\n";
  };

  auto* wv_train = app.add_subcommand("wv-train", "Train SGNS word vectors");
  std::string wv_corpus;
  wv_train->add_option("corpus", wv_corpus, "Training corpus")->required()->check(CLI::ExistingFile);
  wv_train->callback([&] {
    action = [&] {
      const RunConfig config = resolve(overrides);
      const Corpus corpus = load_corpus(wv_corpus, config);
      const Embeddings emb = train<float>(corpus, config.similarity().sgns);
      write_vectors(emb, config, {{"corpus", corpus.id()}});
      return 0;
    };
  });

  auto* wv_continue = app.add_subcommand("wv-continue", "Continue SGNS training on a target corpus");
  std::string wvc_vectors, wvc_target;
  wv_continue->add_option("--vectors", wvc_vectors, "Source embeddings")->required()->check(CLI::ExistingFile);
  wv_continue->add_option("target", wvc_target, "Target corpus")->required()->check(CLI::ExistingFile);
  wv_continue->callback([&] {
    action = [&] {
      const RunConfig config = resolve(overrides);
      const Embeddings source = read_embeddings(wvc_vectors);
      const Corpus target = load_corpus(wvc_target, config);
      const Embeddings emb =
          continue_training<float>(source, target, config.similarity().continuation_params());
      write_vectors(emb, config, {{"source_vectors", wvc_vectors}, {"target", target.id()}});
      return 0;
    };
  });

  auto* wvv = app.add_subcommand("wvv", "Word vector variance between two embedding files");
  std::string wvv_a, wvv_b;
  wvv->add_option("source", wvv_a, "Source-trained embeddings")->required()->check(CLI::ExistingFile);
  wvv->add_option("continued", wvv_b, "Continuation-trained embeddings")->required()->check(CLI::ExistingFile);
  wvv->callback([&] {
    action = [&] {
      const RunConfig config = resolve(overrides);
      const WvvResult r = word_vector_variance(read_embeddings(wvv_a), read_embeddings(wvv_b));
      emit_json(stamped({{"source", wvv_a}, {"continued", wvv_b}, {"wvv", r.value},
                         {"vocab_size", r.vocab_size}, {"dim", r.dim}},
                        config),
                out_path);
      return 0;
    };
  });

  auto* tvc = app.add_subcommand("tvc", "Target vocabulary coverage, overall and for content words");
  std::string tvc_source, tvc_target, source_tags, target_tags;
  tvc->add_option("source", tvc_source, "Source corpus")->required()->check(CLI::ExistingFile);
  tvc->add_option("target", tvc_target, "Target corpus")->required()->check(CLI::ExistingFile);
  tvc->add_option("--source-tags", source_tags, "POS tags per source sentence")->check(CLI::ExistingFile);
  tvc->add_option("--target-tags", target_tags, "POS tags per target sentence")->check(CLI::ExistingFile);
  tvc->callback([&] {
    action = [&] {
      const RunConfig config = resolve(overrides);
      const Corpus source = load_corpus(tvc_source, config);
      const Corpus target = load_corpus(tvc_target, config);
      const ContentWordFilter filter = config.make_content_filter();
      const double coverage = target_vocab_covered(build_vocab(source), build_vocab(target));
      std::optional<TagStream> st, tt;
      if (!source_tags.empty()) st = read_tags(source_tags);
      if (!target_tags.empty()) tt = read_tags(target_tags);
      const double content = tvcc(source, target, filter, st ? &*st : nullptr, tt ? &*tt : nullptr);
      emit_json(stamped({{"source", source.id()}, {"target", target.id()}, {"tvc", coverage},
                         {"tvcc", content}},
                        config),
                out_path);
      return 0;
    };
  });

  auto* report = app.add_subcommand("report", "Score every source against a target");
  std::string report_target;
  std::vector<std::string> report_sources;
  report->add_option("--target", report_target, "Target corpus")->required()->check(CLI::ExistingFile);
  report->add_option("sources", report_sources, "Source corpora")->required()->check(CLI::ExistingFile);
  report->callback([&] {
    action = [&] {
      const RunConfig config = resolve(overrides);
      const Corpus target = load_corpus(report_target, config);
      std::vector<Corpus> sources;
      for (const auto& p : report_sources) sources.push_back(load_corpus(p, config));
      ArtifactCache cache(config.cache_dir);
      const SimilarityReport r = build_report(target, sources, config.similarity(), cache);
      for (const auto& note : r.disagreements) std::cerr << "note: " << note << "\n";
      if (config.output_format == OutputFormat::kCsv) {
        emit("# corpsim " + std::string(kToolVersion) + " config " + config.digest() + "\n" +
                 reports_to_csv(std::span(&r, 1)),
             out_path);
      } else {
        emit_json(stamped({{"generated_at", utc_timestamp()},
                           {"config", to_json(config)},
                           {"report", report_to_json(r)}},
                          config),
                  out_path);
      }
      return 0;
    };
  });

  auto* rank = app.add_subcommand("rank", "Rank sources per target from a report or fixture");
  std::string rank_input;
  std::string rank_measures = "ppl,wvv,tvc,tvcc";
  rank->add_option("input", rank_input, "Report JSON/CSV or fixture CSV (default: bundled fixture)")
      ->check(CLI::ExistingFile);
  rank->add_option("--measure", rank_measures, "Measures to rank by");
  rank->callback([&] {
    action = [&] {
      const RunConfig config = resolve(overrides);
      const auto rows = load_rows(rank_input);
      json out = json::array();
      for (const auto& [target, scores] : scores_by_target(rows)) {
        for (Measure m : parse_measure_list(rank_measures)) {
          const Ranking r = rank_sources(scores, m);
          out.push_back({{"target", target}, {"measure", measure_name(m)},
                         {"order", r.order}, {"ties", r.ties}});
        }
      }
      emit_json(stamped({{"input", rank_input.empty() ? "bundled fixture" : rank_input},
                         {"rankings", out}},
                        config),
                out_path);
      return 0;
    };
  });

  auto* agree = app.add_subcommand("agree", "Fleiss's kappa between measures over pairwise comparisons");
  std::string agree_input, tie_policy = "reject";
  std::string raters = "ppl,wvv,tvc";
  agree->add_option("input", agree_input, "Report JSON/CSV or fixture CSV (default: bundled fixture)")
      ->check(CLI::ExistingFile);
  agree->add_option("--raters", raters, "Measures acting as raters");
  agree->add_option("--tie-policy", tie_policy, "reject or exclude")
      ->check(CLI::IsMember({"reject", "exclude"}));
  agree->callback([&] {
    action = [&] {
      const RunConfig config = resolve(overrides);
      const auto rows = load_rows(agree_input);
      const auto measures = parse_measure_list(raters);
      const auto comparisons = enumerate_comparisons(
          rows, measures, tie_policy == "exclude" ? TiePolicy::kExclude : TiePolicy::kReject);
      const AgreementResult r = fleiss_kappa(comparisons, measures);
      json body = {{"input", agree_input.empty() ? "bundled fixture" : agree_input},
                   {"raters", measure_names(measures)},
                   {"kappa", r.kappa},
                   {"observed_agreement", r.observed},
                   {"expected_agreement", r.expected},
                   {"n_items", r.n_items},
                   {"n_raters", r.n_raters},
                   {"n_categories", r.n_categories}};
      if (agree_input.empty()) {
        body["reference"] = {{"kappa", kReferenceKappa},
                             {"tolerance", kKappaTolerance},
                             {"within_tolerance", std::abs(r.kappa - kReferenceKappa) <= kKappaTolerance}};
      }
      emit_json(stamped(body, config), out_path);
      return 0;
    };
  });

  auto* correlate = app.add_subcommand("correlate", "Pearson correlation of measures with downstream gains");
  std::string correlate_input;
  correlate->add_option("input", correlate_input, "Fixture CSV (default: bundled fixture)")
      ->check(CLI::ExistingFile);
  correlate->callback([&] {
    action = [&] {
      const RunConfig config = resolve(overrides);
      const auto rows = load_rows(correlate_input);
      if (rows.size() < 30)
        warn("only " + std::to_string(rows.size()) + " rows; the reference table pools 30");
      const auto pooled = predictiveness_table(rows);
      json cells = json::array();
      json discrepancies = json::array();
      for (const auto& c : pooled) {
        const double reference = reference_correlation(c.measure, c.downstream);
        json cell = correlation_json(c);
        cell["reference"] = reference;
        cell["within_tolerance"] = std::abs(c.r - reference) <= kCorrelationTolerance;
        if (!cell["within_tolerance"].get<bool>()) {
          discrepancies.push_back({{"measure", measure_name(c.measure)},
                                   {"downstream", downstream_name(c.downstream)},
                                   {"r", c.r},
                                   {"reference", reference},
                                   {"difference", c.r - reference}});
        }
        cells.push_back(std::move(cell));
      }
      json body = {{"input", correlate_input.empty() ? "bundled fixture" : correlate_input},
                   {"n", rows.size()},
                   {"tolerance", kCorrelationTolerance},
                   {"pooled", cells},
                   {"discrepancies", discrepancies}};
      if (!discrepancies.empty()) {
        warn(std::to_string(discrepancies.size()) +
             " pooled coefficient(s) fall outside tolerance; per-target correlations included");
        json per_target = json::array();
        for (const auto& c : per_target_correlations(rows)) per_target.push_back(correlation_json(c));
        body["per_target"] = per_target;
      }
      emit_json(stamped(body, config), out_path);
      return 0;
    };
  });

  auto* fixtures = app.add_subcommand("fixtures", "Write the bundled score fixture as CSV");
  fixtures->callback([&] {
    action = [&] {
      const RunConfig config = resolve(overrides);
      emit("# corpsim " + std::string(kToolVersion) + " config " + config.digest() + "\n" +
               std::string(bundled_fixture_csv()),
           out_path);
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  try {
    return action ? action() : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
