// test_corpus.cpp
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

#include <set>

#include "corpsim/corpus.hpp"
#include "corpsim/error.hpp"
#include "corpsim/rng.hpp"
#include "support/synthetic.hpp"

using namespace corpsim;

TEST_CASE("tokenize splits punctuation and folds case") {
  CHECK(tokenize("Aspirin, 100mg.") == std::vector<std::string>{"aspirin", ",", "100mg", "."});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  \t \n").empty());
  CHECK(tokenize("a--b") == std::vector<std::string>{"a", "-", "-", "b"});
}

TEST_CASE("tokenize respects its switches") {
  CHECK(tokenize("Aspirin, 100mg.", {false, true}) ==
        std::vector<std::string>{"Aspirin", ",", "100mg", "."});
  CHECK(tokenize("Aspirin, 100mg.", {true, false}) == std::vector<std::string>{"aspirin,", "100mg."});
}

TEST_CASE("tokenize treats Unicode spaces as separators and keeps other bytes") {
  CHECK(tokenize("a\xC2\xA0" "b\xE2\x80\x83" "c\xE3\x80\x80" "d") ==
        std::vector<std::string>{"a", "b", "c", "d"});
  // Non-ASCII letters are neither folded nor split.
  CHECK(tokenize("\xC3\x89T\xC3\x89") == std::vector<std::string>{"\xC3\x89t\xC3\x89"});
}

TEST_CASE("tokenize never yields empty or whitespace tokens") {
  Rng rng = Rng::stream(7, "fuzz");
  const std::string alphabet = "aB1 .,\t\n!?-";
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const auto len = rng.below(40);
    for (std::uint64_t i = 0; i < len; ++i) text.push_back(alphabet[rng.below(alphabet.size())]);
    for (const auto& t : tokenize(text)) {
      CHECK_FALSE(t.empty());
      CHECK(t.find_first_of(" \t\n") == std::string::npos);
    }
  }
}

TEST_CASE("segment_sentences splits on newlines and terminal punctuation") {
  CHECK(segment_sentences("One. Two! Three?\nFour") ==
        std::vector<std::string>{"One.", "Two!", "Three?", "Four"});
  CHECK(segment_sentences("3.5 mg daily.") == std::vector<std::string>{"3.5 mg daily."});
  CHECK(segment_sentences("\n\n  \n").empty());
}

TEST_CASE("line mode uses one sentence per non-blank line") {
  const Corpus c = Corpus::from_text("c", "first line\n\nsecond. line\nthird\n");
  CHECK(c.sentence_count() == 3);
  CHECK(c.token_count() == 6);
  CHECK(c.longest_sentence() == 3);
}

TEST_CASE("raw mode segments sentences") {
  const Corpus c = Corpus::from_text("c", "Hi there. Bye now.", InputMode::kRaw);
  CHECK(c.sentence_count() == 2);
  CHECK(c.sentences()[0] == Sentence{"hi", "there", "."});
}

TEST_CASE("empty input gives an empty corpus") {
  const Corpus c = Corpus::from_text("empty", "");
  CHECK(c.empty());
  CHECK(c.token_count() == 0);
  CHECK(c.normalized_text().empty());
}

TEST_CASE("token count equals the sum of sentence lengths") {
  const Corpus c = testing::topic_corpus("t", 3, {.tokens = 2000});
  std::uint64_t sum = 0;
  for (const auto& s : c.sentences()) {
    CHECK_FALSE(s.empty());
    sum += s.size();
  }
  CHECK(sum == c.token_count());
}

TEST_CASE("digest depends only on normalized content") {
  const Corpus a = Corpus::from_text("a", "Hello,  world\n");
  const Corpus b = Corpus::from_text("b", "hello , world\n\n");
  CHECK(a.digest() == b.digest());
  CHECK(a.digest().size() == 64);
  CHECK(a.digest() != Corpus::from_text("c", "hello world\n").digest());
  // Matches coreutils sha256sum of "hello , world\n".
  CHECK(a.digest() == "e2dbea244d647ad8c392257f8b13cce24c90e3d036b930472d1729d09a0a0a05");
}

TEST_CASE("vocabulary orders by count then token") {
  const Corpus c = testing::corpus_of("c", {"b a b", "c a b"});
  const Vocabulary v = build_vocab(c);
  CHECK(v.tokens() == std::vector<std::string>{"b", "a", "c"});
  CHECK(v.count(0) == 3);
  CHECK(v.total_tokens() == 6);
  CHECK(v.id("c") == 2);
  CHECK(v.id("zzz") == -1);
  CHECK_FALSE(v.find("zzz").has_value());
  CHECK(v.find("a")->count == 2);
}

TEST_CASE("min_count prunes rare tokens") {
  const Corpus c = testing::corpus_of("c", {"b a b", "c a b"});
  const Vocabulary v = build_vocab(c, 2);
  CHECK(v.tokens() == std::vector<std::string>{"b", "a"});
  CHECK(v.total_tokens() == 6);
  CHECK_THROWS_AS(build_vocab(c, 0), Error);
}

TEST_CASE("vocabulary counts add up to the corpus size at min_count 1") {
  const Corpus c = testing::topic_corpus("t", 5, {.tokens = 3000});
  const Vocabulary v = build_vocab(c);
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < v.size(); ++i) sum += v.count(static_cast<std::int32_t>(i));
  CHECK(sum == c.token_count());
  for (std::size_t i = 1; i < v.size(); ++i)
    CHECK(v.count(static_cast<std::int32_t>(i - 1)) >= v.count(static_cast<std::int32_t>(i)));
}

TEST_CASE("cap_tokens keeps whole sentences within budget") {
  std::vector<std::string> lines(5, "x y");
  const Corpus c = testing::corpus_of("c", lines);
  const Corpus capped = cap_tokens(c, 4, 1);
  CHECK(capped.sentence_count() == 2);
  CHECK(capped.token_count() == 4);
}

TEST_CASE("cap_tokens is seeded, bounded and order preserving") {
  const Corpus c = testing::topic_corpus("t", 11, {.tokens = 5000});
  for (std::uint64_t seed : {1, 2, 3}) {
    const Corpus a = cap_tokens(c, 1000, seed);
    const Corpus b = cap_tokens(c, 1000, seed);
    CHECK(a.normalized_text() == b.normalized_text());
    CHECK(a.token_count() <= 1000);
    CHECK(a.token_count() > 1000 - c.longest_sentence());
    // Chosen sentences appear in their original relative order.
    std::size_t cursor = 0;
    for (const auto& s : a.sentences()) {
      while (cursor < c.sentence_count() && c.sentences()[cursor] != s) ++cursor;
      CHECK(cursor < c.sentence_count());
      ++cursor;
    }
  }
  CHECK(cap_tokens(c, 1000, 1).normalized_text() != cap_tokens(c, 1000, 2).normalized_text());
}

TEST_CASE("cap_tokens edge cases") {
  const Corpus c = testing::corpus_of("c", {"a b c", "d"});
  CHECK(cap_tokens(c, 10, 1).normalized_text() == c.normalized_text());
  CHECK_THROWS_AS(cap_tokens(c, 2, 1), Error);
}

TEST_CASE("default lexicon filter drops function words, punctuation and numbers") {
  const auto filter = ContentWordFilter::default_lexicon();
  const Sentence s{"the", "drug", "was", "given", "at", "100", "mg", ",", "daily"};
  CHECK(filter_content_words(s, filter) == std::vector<std::string>{"drug", "given", "mg", "daily"});
}

TEST_CASE("custom lexicon is case-folded to the tokenizer convention") {
  const auto filter = ContentWordFilter::lexicon({"The", "DRUG"});
  CHECK(filter.exclusion_lexicon().contains("drug"));
  const Sentence s{"the", "drug", "works"};
  CHECK(filter_content_words(s, filter) == std::vector<std::string>{"works"});
}

TEST_CASE("external tags keep nouns, verbs and adjectives") {
  const auto filter = ContentWordFilter::external_pos_tags();
  const Sentence s{"the", "new", "drug", "works", "well"};
  const std::vector<std::string> tags{"DT", "JJ", "NN", "VBZ", "RB"};
  CHECK(filter_content_words(s, filter, tags) == std::vector<std::string>{"new", "drug", "works"});
  const std::vector<std::string> ud{"DET", "ADJ", "NOUN", "VERB", "ADV"};
  CHECK(filter_content_words(s, filter, ud) == std::vector<std::string>{"new", "drug", "works"});
  const std::vector<std::string> short_tags{"DT"};
  CHECK_THROWS_AS(filter_content_words(s, filter, short_tags), Error);
  CHECK_THROWS_AS(filter_content_words(s, filter), Error);
}

TEST_CASE("punctuation and numbers are recognised") {
  CHECK(is_punct_or_numeric(","));
  CHECK(is_punct_or_numeric("3.14"));
  CHECK_FALSE(is_punct_or_numeric("100mg"));
  CHECK_FALSE(is_punct_or_numeric("\xC3\xA9"));
}

TEST_CASE("function word list is sorted and unique") {
  const auto& words = english_function_words();
  CHECK(words.size() > 100);
  CHECK(std::is_sorted(words.begin(), words.end()));
  CHECK(std::adjacent_find(words.begin(), words.end()) == words.end());
}

TEST_CASE("rng streams are reproducible and independent") {
  Rng a = Rng::stream(42, "init");
  Rng b = Rng::stream(42, "init");
  Rng c = Rng::stream(42, "negatives");
  const auto x = a.next();
  CHECK(x == b.next());
  CHECK(x != c.next());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(a.below(7) < 7);
  }
}
