// test_arpa.cpp
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

#include <cmath>
#include <sstream>

#include "corpsim/arpa.hpp"
#include "corpsim/error.hpp"
#include "support/synthetic.hpp"

using namespace corpsim;
using testing::corpus_of;

namespace {

int parse_error_line(const std::string& text) {
  try {
    import_arpa(text);
  } catch (const ParseError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

}  // namespace

TEST_CASE("hand-written unigram model scores by hand arithmetic") {
  const std::string text =
      "\\data\\\n"
      "ngram 1=2\n"
      "\n"
      "\\1-grams:\n"
      "-0.30103 a\n"
      "-0.30103 </s>\n"
      "\n"
      "\\end\\\n";
  const KNModel m = import_arpa(text);
  CHECK(m.order() == 1);
  const Sentence s{"a", "a"};
  CHECK(score_sentence(m, s).log10_prob == doctest::Approx(3 * -0.30103));
  // No <unk> entry: unknown words cannot be scored.
  CHECK_THROWS_AS(score_sentence(m, Sentence{"b"}), Error);
}

TEST_CASE("back-off arithmetic of a hand-written bigram model") {
  const std::string text =
      "\\data\\\n"
      "ngram 1=4\n"
      "ngram 2=2\n"
      "\\1-grams:\n"
      "-99 <s> -0.2\n"
      "-0.5 a -0.1\n"
      "-0.4 </s>\n"
      "-0.9 <unk>\n"
      "\\2-grams:\n"
      "-0.3 <s> a\n"
      "-0.2 a </s>\n"
      "\\end\\\n";
  const KNModel m = import_arpa(text);
  // <s> a: -0.3; a </s>: -0.2.
  CHECK(score_sentence(m, Sentence{"a"}).log10_prob == doctest::Approx(-0.5));
  // <s> <unk>: bo(<s>) + p(<unk>) = -1.1; <unk> </s>: -0.4.
  CHECK(score_sentence(m, Sentence{"q"}).log10_prob == doctest::Approx(-1.5));
  // a a: bo(a) + p(a) = -0.6.
  CHECK(score_sentence(m, Sentence{"a", "a"}).log10_prob == doctest::Approx(-0.3 - 0.6 - 0.2));
}

TEST_CASE("round trip preserves every sentence score") {
  const Corpus c = testing::topic_corpus("t", 21, {.tokens = 3000});
  const Corpus held = testing::topic_corpus("h", 22, {.tokens = 800});
  const KNModel m = train_lm(c, 4);
  const KNModel back = import_arpa(export_arpa(m));
  CHECK(back.order() == 4);
  for (int k = 1; k <= 4; ++k) CHECK(back.entries(k).size() == m.entries(k).size());
  for (const auto& s : held.sentences())
    CHECK(std::abs(score_sentence(m, s).log10_prob - score_sentence(back, s).log10_prob) <= 1e-4);
  const double p1 = perplexity(m, held).mean_ppl;
  const double p2 = perplexity(back, held).mean_ppl;
  CHECK(std::abs(p1 - p2) <= 1e-4 * p1);
  // A second trip is lossless.
  CHECK(export_arpa(back) == export_arpa(import_arpa(export_arpa(back))));
}

TEST_CASE("header counts match the stored entries") {
  const KNModel m = train_lm(corpus_of("c", {"a b c", "b c", "c a"}), 3);
  const std::string text = export_arpa(m);
  for (int k = 1; k <= 3; ++k) {
    const std::string line = "ngram " + std::to_string(k) + "=" + std::to_string(m.entries(k).size());
    CHECK(text.find(line) != std::string::npos);
  }
  CHECK(text == export_arpa(m));
}

TEST_CASE("leading comments before the data header are ignored") {
  const KNModel m = train_lm(corpus_of("c", {"a b"}), 2);
  const KNModel back = import_arpa("# written by a tool\n\n" + export_arpa(m));
  CHECK(back.entries(2).size() == m.entries(2).size());
}

TEST_CASE("malformed ARPA reports the offending line") {
  const std::string good_head = "\\data\\\nngram 1=2\n\\1-grams:\n";
  CHECK(parse_error_line("nothing here\n") == 1);
  CHECK(parse_error_line(good_head + "-0.3 a\nzero </s>\n\\end\\\n") == 5);
  CHECK(parse_error_line(good_head + "-0.3 a\n0.5 </s>\n\\end\\\n") == 5);
  CHECK(parse_error_line(good_head + "-0.3 a\n-0.3 a\n\\end\\\n") == 5);
  CHECK(parse_error_line(good_head + "-0.3 a b c d\n") == 4);
  CHECK(parse_error_line("\\data\\\nngram 1=1\nngram 2=1\n\\1-grams:\n-0.3 a\n\\2-grams:\n-0.1 a b\n\\end\\\n") == 7);
  CHECK(parse_error_line("\\data\\\nngram 1=1\n\\2-grams:\n") == 3);
  CHECK(parse_error_line("\\data\\\nngram 1=1\n\\1-grams:\n-0.3 a -0.1 x\n") == 4);
  CHECK(parse_error_line("\\data\\\nngram x=1\n") == 2);
  CHECK(parse_error_line("\\data\\\nngram 2=1\n") >= 2);
  CHECK(parse_error_line(good_head + "-0.3 a\n") > 0);
  CHECK(parse_error_line(good_head + "-0.3 a\n\\end\\\n") > 0);
  CHECK(parse_error_line("\\data\\\nngram 1=1\n\\1-grams:\n-0.3 a -0.2\n\\end\\\n") == 4);
}
