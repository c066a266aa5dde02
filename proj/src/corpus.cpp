// corpus.cpp
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

#include "corpsim/corpus.hpp"

#include <algorithm>
#include <numeric>

#include "corpsim/digest.hpp"
#include "corpsim/error.hpp"
#include "corpsim/rng.hpp"

namespace corpsim {
namespace {

// Byte length of the Unicode whitespace sequence starting at text[i], or 0.
std::size_t whitespace_length(std::string_view text, std::size_t i) {
  const auto byte = [&](std::size_t k) -> unsigned char {
    return i + k < text.size() ? static_cast<unsigned char>(text[i + k]) : 0;
  };
  const unsigned char c = byte(0);
  if (c == ' ' || (c >= '\t' && c <= '\r')) return 1;
  if (c == 0xC2 && (byte(1) == 0x85 || byte(1) == 0xA0)) return 2;
  if (c == 0xE1 && byte(1) == 0x9A && byte(2) == 0x80) return 3;
  if (c == 0xE2 && byte(1) == 0x80) {
    const unsigned char d = byte(2);
    if ((d >= 0x80 && d <= 0x8A) || d == 0xA8 || d == 0xA9 || d == 0xAF) return 3;
  }
  if (c == 0xE2 && byte(1) == 0x81 && byte(2) == 0x9F) return 3;
  if (c == 0xE3 && byte(1) == 0x80 && byte(2) == 0x80) return 3;
  return 0;
}

bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
         (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
}

char fold(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size()) {
    const std::size_t w = whitespace_length(s, b);
    if (w == 0) break;
    b += w;
  }
  std::size_t e = s.size();
  // Trailing trim only needs ASCII; multi-byte spaces are rare at line ends
  // and tokenize() discards them anyway.
  while (e > b && whitespace_length(s, e - 1) == 1) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
  std::vector<std::string> tokens;
  std::string current;
  const auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    if (const std::size_t w = whitespace_length(text, i)) {
      flush();
      i += w;
      continue;
    }
    const char c = text[i];
    if (config.split_punctuation && is_ascii_punct(static_cast<unsigned char>(c))) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      current.push_back(config.lowercase ? fold(c) : c);
    }
    ++i;
  }
  flush();
  return tokens;
}

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  const auto emit = [&](std::string_view piece) {
    piece = trim(piece);
    if (!piece.empty()) out.emplace_back(piece);
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      emit(text.substr(start, i - start));
      start = i + 1;
    } else if ((c == '.' || c == '!' || c == '?') && i + 1 < text.size() &&
               text[i + 1] != '\n' && whitespace_length(text, i + 1) > 0) {
      emit(text.substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  emit(text.substr(start));
  return out;
}

Corpus::Corpus(std::string id, std::vector<Sentence> sentences, std::string source_descriptor)
    : id_(std::move(id)), source_(std::move(source_descriptor)) {
  sentences_.reserve(sentences.size());
  for (auto& s : sentences) {
    if (s.empty()) continue;
    token_count_ += s.size();
    sentences_.push_back(std::move(s));
  }
}

Corpus Corpus::from_text(std::string id, std::string_view text, InputMode mode,
                         const TokenizerConfig& config, std::string source_descriptor) {
  std::vector<Sentence> sentences;
  if (mode == InputMode::kRaw) {
    for (const auto& s : segment_sentences(text)) sentences.push_back(tokenize(s, config));
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      sentences.push_back(tokenize(text.substr(start, end - start), config));
      start = end + 1;
    }
  }
  return Corpus(std::move(id), std::move(sentences), std::move(source_descriptor));
}

std::size_t Corpus::longest_sentence() const noexcept {
  std::size_t longest = 0;
  for (const auto& s : sentences_) longest = std::max(longest, s.size());
  return longest;
}

std::string Corpus::normalized_text() const {
  std::string out;
  for (const auto& s : sentences_) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i) out.push_back(' ');
      out += s[i];
    }
    out.push_back('\n');
  }
  return out;
}

std::string Corpus::digest() const { return sha256_hex(normalized_text()); }

CorpusManifest manifest(const Corpus& corpus) {
  return {corpus.id(), corpus.token_count(), corpus.sentence_count(), corpus.digest()};
}

Vocabulary::Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> counts,
                       std::uint64_t total_tokens)
    : total_tokens_(total_tokens) {
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  tokens_.reserve(counts.size());
  counts_.reserve(counts.size());
  for (auto& [token, count] : counts) append(std::move(token), count);
}

Vocabulary Vocabulary::ordered(std::vector<std::pair<std::string, std::uint64_t>> entries,
                               std::uint64_t total_tokens) {
  Vocabulary v;
  v.total_tokens_ = total_tokens;
  for (auto& [token, count] : entries) v.append(std::move(token), count);
  return v;
}

void Vocabulary::append(std::string token, std::uint64_t count) {
  if (count == 0) throw Error("vocabulary counts must be positive: " + token);
  const auto id = static_cast<std::int32_t>(tokens_.size());
  if (!index_.emplace(token, id).second) throw Error("duplicate vocabulary token: " + token);
  tokens_.push_back(std::move(token));
  counts_.push_back(count);
}

bool Vocabulary::contains(std::string_view token) const { return index_.find(token) != index_.end(); }

std::optional<Vocabulary::Entry> Vocabulary::find(std::string_view token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return Entry{it->second, counts_[it->second]};
}

std::int32_t Vocabulary::id(std::string_view token) const {
  const auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second;
}

Vocabulary build_vocab(const Corpus& corpus, std::uint64_t min_count) {
  if (min_count < 1) throw Error("min_count must be at least 1");
  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& s : corpus.sentences())
    for (const auto& t : s) ++freq[t];
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  kept.reserve(freq.size());
  for (auto& [token, count] : freq)
    if (count >= min_count) kept.emplace_back(token, count);
  return Vocabulary(std::move(kept), corpus.token_count());
}

Corpus cap_tokens(const Corpus& corpus, std::uint64_t max_tokens, std::uint64_t seed) {
  const std::size_t longest = corpus.longest_sentence();
  if (max_tokens < longest) {
    throw Error("token cap " + std::to_string(max_tokens) +
                " is shorter than the longest sentence (" + std::to_string(longest) + ")");
  }
  if (corpus.token_count() <= max_tokens) return corpus;

  const auto& sentences = corpus.sentences();
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng = Rng::stream(seed, "sampling");
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

  // Greedy over every sentence: once the scan finishes, any skipped sentence
  // would have overflowed, so the total exceeds max_tokens - longest.
  std::vector<std::size_t> chosen;
  std::uint64_t total = 0;
  for (std::size_t idx : order) {
    if (total + sentences[idx].size() <= max_tokens) {
      total += sentences[idx].size();
      chosen.push_back(idx);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<Sentence> out;
  out.reserve(chosen.size());
  for (std::size_t idx : chosen) out.push_back(sentences[idx]);
  return Corpus(corpus.id(), std::move(out), corpus.source_descriptor());
}

ContentWordFilter ContentWordFilter::default_lexicon() {
  ContentWordFilter f;
  for (auto w : english_function_words()) f.lexicon_.emplace(w);
  return f;
}

ContentWordFilter ContentWordFilter::lexicon(std::unordered_set<std::string> words,
                                             const TokenizerConfig& config) {
  ContentWordFilter f;
  for (const auto& w : words) {
    std::string stored = w;
    if (config.lowercase) std::transform(stored.begin(), stored.end(), stored.begin(), fold);
    f.lexicon_.insert(std::move(stored));
  }
  return f;
}

ContentWordFilter ContentWordFilter::external_pos_tags() {
  ContentWordFilter f;
  f.mode_ = Mode::kExternalPosTags;
  return f;
}

bool is_punct_or_numeric(std::string_view token) {
  if (token.empty()) return true;
  return std::none_of(token.begin(), token.end(), [](char ch) {
    const auto c = static_cast<unsigned char>(ch);
    return c >= 0x80 || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
}

bool is_content_tag(std::string_view tag) {
  return tag.starts_with("NN") || tag.starts_with("VB") || tag.starts_with("JJ") ||
         tag == "NOUN" || tag == "PROPN" || tag == "VERB" || tag == "ADJ";
}

std::vector<std::string> filter_content_words(std::span<const std::string> sentence,
                                              const ContentWordFilter& filter) {
  if (filter.mode() != ContentWordFilter::Mode::kLexicon)
    throw Error("external POS filter requires a tag sequence");
  std::vector<std::string> out;
  for (const auto& t : sentence)
    if (!is_punct_or_numeric(t) && !filter.exclusion_lexicon().contains(t)) out.push_back(t);
  return out;
}

std::vector<std::string> filter_content_words(std::span<const std::string> sentence,
                                              const ContentWordFilter& filter,
                                              std::span<const std::string> tags) {
  if (filter.mode() == ContentWordFilter::Mode::kLexicon)
    return filter_content_words(sentence, filter);
  if (tags.size() != sentence.size()) {
    throw Error("POS annotation length " + std::to_string(tags.size()) +
                " does not match sentence length " + std::to_string(sentence.size()));
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < sentence.size(); ++i)
    if (is_content_tag(tags[i])) out.push_back(sentence[i]);
  return out;
}

}  // namespace corpsim
