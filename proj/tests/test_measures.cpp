// test_measures.cpp
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

#include <filesystem>

#include "corpsim/analysis.hpp"
#include "corpsim/error.hpp"
#include "corpsim/measures.hpp"
#include "corpsim/report_io.hpp"
#include "support/synthetic.hpp"

using namespace corpsim;
using testing::corpus_of;

namespace {

Vocabulary vocab_of(std::initializer_list<std::string> tokens) {
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  for (const auto& t : tokens) counts.emplace_back(t, 1);
  return Vocabulary(counts, counts.size());
}

SimilarityConfig fast_config() {
  SimilarityConfig c;
  c.lm_order = 3;
  c.sgns.dim = 16;
  c.sgns.epochs = 2;
  c.sgns.min_count = 1;
  c.sgns.window = 3;
  return c;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("corpsim-" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

// Shares the function words f0..f9 with topic_corpus but no content word.
Corpus content_disjoint(const std::string& id, std::uint64_t seed, std::uint64_t tokens) {
  testing::SyntheticSpec spec;
  spec.tokens = tokens;
  spec.prefix = "z";
  return testing::topic_corpus(id, seed, spec);
}

}  // namespace

TEST_CASE("target vocabulary coverage is an exact ratio") {
  CHECK(target_vocab_covered(vocab_of({"a", "b", "c"}), vocab_of({"b", "c", "d"})) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(target_vocab_covered(vocab_of({"b", "c", "d"}), vocab_of({"a", "b", "c"})) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(target_vocab_covered(vocab_of({"a", "b"}), vocab_of({"b"})) == 1.0);
  CHECK(target_vocab_covered(vocab_of({"b"}), vocab_of({"a", "b"})) == 0.5);
  CHECK(target_vocab_covered(vocab_of({"a"}), vocab_of({"a"})) == 1.0);
  CHECK(target_vocab_covered(vocab_of({"a"}), vocab_of({"b"})) == 0.0);
  CHECK_THROWS_AS(target_vocab_covered(vocab_of({"a"}), Vocabulary{}), Error);
}

TEST_CASE("coverage ignores repetition") {
  const Corpus s = corpus_of("s", {"a b", "c"});
  const Corpus t = corpus_of("t", {"b d", "a e"});
  const Corpus t2 = corpus_of("t", {"b d", "a e", "b d", "a e"});
  CHECK(target_vocab_covered(build_vocab(s), build_vocab(t)) ==
        target_vocab_covered(build_vocab(s), build_vocab(t2)));
}

TEST_CASE("content-word coverage") {
  const auto the_only = ContentWordFilter::lexicon({"the"});
  CHECK(tvcc(corpus_of("s", {"drug works"}), corpus_of("t", {"the drug helps"}), the_only) == 0.5);

  const auto nothing = ContentWordFilter::lexicon({});
  const Corpus s = corpus_of("s", {"a b c"});
  const Corpus t = corpus_of("t", {"b c d"});
  CHECK(tvcc(s, t, nothing) == target_vocab_covered(build_vocab(s), build_vocab(t)));

  CHECK_THROWS_AS(tvcc(corpus_of("s", {"the of"}), corpus_of("t", {"the and of"}),
                       ContentWordFilter::default_lexicon()),
                  Error);
}

TEST_CASE("content-word coverage from external tags") {
  const auto filter = ContentWordFilter::external_pos_tags();
  const Corpus s = corpus_of("s", {"the drug works"});
  const Corpus t = corpus_of("t", {"a drug helps"});
  const TagStream st{{"DT", "NN", "VBZ"}};
  const TagStream tt{{"DT", "NN", "VBZ"}};
  CHECK(tvcc(s, t, filter, &st, &tt) == 0.5);
  CHECK_THROWS_AS(tvcc(s, t, filter), Error);
  const TagStream wrong{{"DT"}};
  CHECK_THROWS_AS(tvcc(s, t, filter, &wrong, &tt), Error);
}

TEST_CASE("measure names parse and carry their direction") {
  for (Measure m : kAllMeasures) CHECK(parse_measure(measure_name(m)) == m);
  CHECK(parse_measure("TVcC") == Measure::kTvcc);
  CHECK_THROWS_AS(parse_measure("bleu"), Error);
  CHECK(lower_is_more_similar(Measure::kPpl));
  CHECK(lower_is_more_similar(Measure::kWvv));
  CHECK_FALSE(lower_is_more_similar(Measure::kTvc));
  CHECK_FALSE(lower_is_more_similar(Measure::kTvcc));
}

TEST_CASE("config digest tracks every score-relevant field") {
  const SimilarityConfig base = fast_config();
  CHECK(base.digest() == fast_config().digest());
  auto other = base;
  other.sgns.window = 2;
  CHECK(other.digest() != base.digest());
  other = base;
  other.lm_order = 4;
  CHECK(other.digest() != base.digest());
  other = base;
  other.continuation_epochs = 0;
  CHECK(other.digest() != base.digest());
  other = base;
  other.content_filter = ContentWordFilter::lexicon({"x"});
  CHECK(other.digest() != base.digest());
}

TEST_CASE("a corpus compared with itself without continuation") {
  const Corpus c = testing::topic_corpus("c", 1, {.tokens = 2000});
  auto cfg = fast_config();
  cfg.continuation_epochs = 0;
  ArtifactCache cache;
  const SimilarityScores s = compute_similarity(c, c, cfg, cache);
  CHECK(*s.tvc == 1.0);
  CHECK(*s.tvcc == 1.0);
  CHECK(*s.wvv == 0.0);
  CHECK(*s.ppl_mean > 1.0);
  CHECK(*s.ppl_sum == doctest::Approx(*s.ppl_mean * static_cast<double>(c.sentence_count())));
  CHECK(s.config_digest == cfg.digest());
}

TEST_CASE("disabled measures stay empty") {
  const Corpus c = testing::topic_corpus("c", 1, {.tokens = 500});
  auto cfg = fast_config();
  cfg.measures = {Measure::kTvc};
  ArtifactCache cache;
  const SimilarityScores s = compute_similarity(c, c, cfg, cache);
  CHECK(s.tvc.has_value());
  CHECK_FALSE(s.ppl_mean.has_value());
  CHECK_FALSE(s.wvv.has_value());
  CHECK_FALSE(s.tvcc.has_value());
}

TEST_CASE("failures are labeled with their measure") {
  const Corpus s = testing::topic_corpus("s", 1, {.tokens = 500});
  const Corpus t = testing::disjoint_corpus("t", 1, 500);
  auto cfg = fast_config();
  cfg.measures = {Measure::kWvv};
  ArtifactCache cache;
  try {
    compute_similarity(s, t, cfg, cache);
    FAIL("expected a measure error");
  } catch (const MeasureError& e) {
    CHECK(std::string(e.what()).rfind("wvv: ", 0) == 0);
  }
}

TEST_CASE("second computation is served from the cache") {
  const Corpus s = testing::topic_corpus("s", 1, {.tokens = 1500});
  const Corpus t = testing::topic_corpus("t", 2, {.tokens = 1500});
  const auto cfg = fast_config();
  const auto dir = fresh_dir("cache-test");
  ArtifactCache cache(dir);
  const auto first = compute_similarity(s, t, cfg, cache);
  const auto second = compute_similarity(s, t, cfg, cache);
  CHECK_FALSE(first.from_cache);
  CHECK(second.from_cache);
  CHECK(*first.ppl_mean == *second.ppl_mean);
  CHECK(*first.wvv == *second.wvv);

  // A new process-level cache over the same directory reuses artifacts.
  ArtifactCache reopened(dir);
  const auto third = compute_similarity(s, t, cfg, reopened);
  CHECK(third.from_cache);
  CHECK(*third.wvv == *first.wvv);
  CHECK(*third.ppl_sum == *first.ppl_sum);

  // Scores recomputed from cached models match a cold run exactly.
  auto other = cfg;
  other.measures = {Measure::kPpl, Measure::kWvv};
  ArtifactCache warm(dir);
  const auto recomputed = compute_similarity(s, t, other, warm);
  CHECK_FALSE(recomputed.from_cache);
  CHECK(warm.stats().lm_hits == 1);
  CHECK(warm.stats().vectors_hits == 1);
  CHECK(*recomputed.ppl_mean == *first.ppl_mean);
  CHECK(*recomputed.wvv == *first.wvv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("near-duplicate source beats a content-disjoint source") {
  testing::SyntheticSpec spec;
  spec.tokens = 4000;
  const Corpus target = testing::topic_corpus("target", 1, spec);
  const Corpus near = testing::topic_corpus("near", 2, spec);
  const Corpus far = content_disjoint("far", 3, 4000);
  const auto cfg = fast_config();
  ArtifactCache cache;
  const auto n = compute_similarity(near, target, cfg, cache);
  const auto f = compute_similarity(far, target, cfg, cache);
  CHECK(*n.ppl_mean < *f.ppl_mean);
  CHECK(*n.tvc > *f.tvc);
  CHECK(*n.tvcc > *f.tvcc);
  // WVV averages over every source row. Rows of the far source's content
  // words never move on this target, so its WVV is the smaller one.
  CHECK(*f.wvv < *n.wvv);
}

TEST_CASE("rank_sources orders by direction and flags ties") {
  std::vector<SimilarityScores> scores(3);
  const char* ids[] = {"b", "a", "c"};
  const double ppl[] = {10, 20, 10};
  const double tvc[] = {0.5, 0.9, 0.1};
  for (int i = 0; i < 3; ++i) {
    scores[i].source_id = ids[i];
    scores[i].target_id = "t";
    scores[i].ppl_mean = ppl[i];
    scores[i].tvc = tvc[i];
  }
  const Ranking by_ppl = rank_sources(scores, Measure::kPpl);
  CHECK(by_ppl.order == std::vector<std::string>{"b", "c", "a"});
  CHECK(by_ppl.ties == std::vector<std::vector<std::string>>{{"b", "c"}});
  const Ranking by_tvc = rank_sources(scores, Measure::kTvc);
  CHECK(by_tvc.order == std::vector<std::string>{"a", "b", "c"});
  CHECK(by_tvc.ties.empty());
  CHECK_THROWS_AS(rank_sources(scores, Measure::kWvv), Error);
  CHECK_THROWS_AS(rank_sources({}, Measure::kPpl), Error);
  scores[2].target_id = "u";
  CHECK_THROWS_AS(rank_sources(scores, Measure::kPpl), Error);
  CHECK(rank_sources(std::span(scores).first(1), Measure::kPpl).order == std::vector<std::string>{"b"});
}

TEST_CASE("fixture rankings") {
  const auto rows = bundled_fixture();
  for (const auto& [target, scores] : scores_by_target(rows)) {
    if (target == "CADEC")
      CHECK(rank_sources(scores, Measure::kPpl).order ==
            std::vector<std::string>{"Yelp", "1BWB", "Wiki", "PubMed", "MIMIC"});
    if (target == "CoNLL2003") CHECK(rank_sources(scores, Measure::kTvc).order.front() == "1BWB");
  }
}

TEST_CASE("report covers every source and ranks with each measure") {
  const Corpus target = testing::topic_corpus("target", 1, {.tokens = 2000});
  const std::vector<Corpus> one{testing::topic_corpus("only", 2, {.tokens = 2000})};
  ArtifactCache cache;
  const auto single = build_report(target, one, fast_config(), cache);
  CHECK(single.scores.size() == 1);
  CHECK(single.rankings.size() == 4);
  for (const auto& [m, r] : single.rankings) CHECK(r.order == std::vector<std::string>{"only"});
  CHECK(single.disagreements.empty());

  const std::vector<Corpus> two{testing::topic_corpus("near", 2, {.tokens = 2000}),
                                content_disjoint("far", 3, 2000)};
  const auto report = build_report(target, two, fast_config(), cache);
  for (Measure m : {Measure::kPpl, Measure::kTvc, Measure::kTvcc})
    CHECK(report.rankings.at(m).order.front() == "near");
  CHECK(report.rankings.at(Measure::kWvv).order.front() == "far");
  CHECK(report.disagreements.size() == 3);

  const auto j = report_to_json(report);
  CHECK(j.at("scores").size() == 2);
  const std::string csv = reports_to_csv(std::span(&report, 1));
  CHECK(csv.rfind(kReportCsvHeader, 0) == 0);
  CHECK(parse_score_csv(csv).size() == 2);
  CHECK(scores_from_json(scores_to_json(report.scores[0])).wvv == report.scores[0].wvv);
  CHECK_THROWS_AS(build_report(target, {}, fast_config(), cache), Error);
}
