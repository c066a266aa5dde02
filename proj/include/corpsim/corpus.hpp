// corpus.hpp
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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace corpsim {

using Sentence = std::vector<std::string>;

struct TokenizerConfig {
  bool lowercase = true;
  bool split_punctuation = true;
};

/// How a text file is turned into sentences.
enum class InputMode {
  kLinePerSentence,  // every non-blank line is one sentence
  kRaw,              // segment_sentences() is applied
};

/// Splits on Unicode whitespace. With punctuation splitting on, every ASCII
/// punctuation character becomes its own token. Lowercasing folds ASCII only.
std::vector<std::string> tokenize(std::string_view text,
                                  const TokenizerConfig& config = {});

/// Splits on newlines and after '.', '!' or '?' when followed by whitespace.
/// Segments are trimmed; empty segments are dropped.
std::vector<std::string> segment_sentences(std::string_view text);

/// Tokenized, sentence-segmented text. Immutable once built.
class Corpus {
 public:
  Corpus() = default;
  /// Empty sentences are dropped.
  Corpus(std::string id, std::vector<Sentence> sentences,
         std::string source_descriptor = {});

  static Corpus from_text(std::string id, std::string_view text,
                          InputMode mode = InputMode::kLinePerSentence,
                          const TokenizerConfig& config = {},
                          std::string source_descriptor = {});

  const std::string& id() const noexcept { return id_; }
  const std::string& source_descriptor() const noexcept { return source_; }
  const std::vector<Sentence>& sentences() const noexcept { return sentences_; }
  std::size_t sentence_count() const noexcept { return sentences_.size(); }
  std::uint64_t token_count() const noexcept { return token_count_; }
  std::size_t longest_sentence() const noexcept;
  bool empty() const noexcept { return sentences_.empty(); }

  /// Tokens joined by single spaces, one sentence per line.
  std::string normalized_text() const;
  /// SHA-256 of normalized_text(); the content key used by the cache.
  std::string digest() const;

 private:
  std::string id_;
  std::vector<Sentence> sentences_;
  std::uint64_t token_count_ = 0;
  std::string source_;
};

struct CorpusManifest {
  std::string id;
  std::uint64_t token_count = 0;
  std::size_t sentence_count = 0;
  std::string sha256;
};

CorpusManifest manifest(const Corpus& corpus);

/// Token inventory with dense ids. Ids are assigned by descending count,
/// ties broken by byte order of the token.
class Vocabulary {
 public:
  struct Entry {
    std::int32_t id;
    std::uint64_t count;
  };

  Vocabulary() = default;
  /// Tokens with their counts; `total_tokens` counts pruned tokens too.
  Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> counts,
             std::uint64_t total_tokens);
  /// Keeps the given order as the id order.
  static Vocabulary ordered(std::vector<std::pair<std::string, std::uint64_t>> entries,
                            std::uint64_t total_tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  std::uint64_t total_tokens() const noexcept { return total_tokens_; }

  bool contains(std::string_view token) const;
  std::optional<Entry> find(std::string_view token) const;
  /// -1 when absent.
  std::int32_t id(std::string_view token) const;
  const std::string& token(std::int32_t id) const { return tokens_.at(id); }
  std::uint64_t count(std::int32_t id) const { return counts_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_ && a.counts_ == b.counts_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  void append(std::string token, std::uint64_t count);

  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::int32_t, Hash, std::equal_to<>> index_;
  std::uint64_t total_tokens_ = 0;
};

Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count = 1);

/// Returns the corpus unchanged when it fits the budget; otherwise a seeded
/// uniform sample of whole sentences holding more than
/// max_tokens - longest_sentence and at most max_tokens tokens. Sentence order
/// is preserved. Throws if max_tokens is shorter than the longest sentence.
Corpus cap_tokens(const Corpus& corpus, std::uint64_t max_tokens,
                  std::uint64_t seed);

/// Content-word selector used by the content-word coverage measure.
class ContentWordFilter {
 public:
  enum class Mode { kLexicon, kExternalPosTags };

  /// The bundled English closed-class lexicon.
  static ContentWordFilter default_lexicon();
  /// Custom exclusion lexicon, stored in the tokenizer's case convention.
  static ContentWordFilter lexicon(std::unordered_set<std::string> words,
                                   const TokenizerConfig& config = {});
  /// Keeps tokens whose supplied tag is a noun, verb or adjective
  /// (Penn NN*/VB*/JJ* or Universal NOUN/PROPN/VERB/ADJ).
  static ContentWordFilter external_pos_tags();

  Mode mode() const noexcept { return mode_; }
  const std::unordered_set<std::string>& exclusion_lexicon() const noexcept {
    return lexicon_;
  }

 private:
  Mode mode_ = Mode::kLexicon;
  std::unordered_set<std::string> lexicon_;
};

/// True for tokens with no letters: pure punctuation, digits or mixtures.
bool is_punct_or_numeric(std::string_view token);

/// True for POS tags treated as content words.
bool is_content_tag(std::string_view tag);

/// Lexicon mode: drops lexicon entries and punctuation/numeric tokens.
std::vector<std::string> filter_content_words(std::span<const std::string> sentence,
                                              const ContentWordFilter& filter);

/// External mode: keeps tokens whose tag is a content tag.
std::vector<std::string> filter_content_words(std::span<const std::string> sentence,
                                              const ContentWordFilter& filter,
                                              std::span<const std::string> tags);

/// Closed-class English word list backing ContentWordFilter::default_lexicon().
const std::vector<std::string_view>& english_function_words();

}  // namespace corpsim
