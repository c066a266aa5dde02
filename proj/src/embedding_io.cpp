// embedding_io.cpp
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

#include "corpsim/embedding_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "corpsim/error.hpp"

namespace corpsim {
namespace {

constexpr std::string_view kMagic{"CSEMB\x01\x00\x00", 8};

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    T value;
    std::memcpy(&value, take(sizeof(T)).data(), sizeof(T));
    return value;
  }

  std::string_view take(std::size_t n) {
    if (n > bytes_.size() - pos_) throw Error("truncated embedding binary");
    const auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

std::string to_word_vector_text(const Embeddings& emb) {
  std::string out = std::to_string(emb.rows()) + ' ' + std::to_string(emb.dim()) + '\n';
  char buf[48];
  for (Eigen::Index i = 0; i < emb.rows(); ++i) {
    out += emb.vocab.token(static_cast<std::int32_t>(i));
    for (Eigen::Index j = 0; j < emb.dim(); ++j) {
      std::snprintf(buf, sizeof buf, " %.6f", static_cast<double>(emb.input(i, j)));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Embeddings from_word_vector_text(std::string_view text) {
  std::size_t line = 1;
  std::size_t pos = 0;
  const auto next_line = [&]() -> std::string_view {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    const auto out = text.substr(pos, end - pos);
    pos = end + 1;
    return out;
  };
  const auto header = next_line();
  long long rows = -1;
  long long dim = -1;
  {
    std::istringstream hs{std::string(header)};
    if (!(hs >> rows >> dim) || rows < 0 || dim < 1) throw ParseError("expected '|V| d' header", 1);
  }

  std::vector<std::pair<std::string, std::uint64_t>> entries;
  RowMatrix<float> input(rows, dim);
  for (long long i = 0; i < rows; ++i) {
    ++line;
    if (pos > text.size()) throw ParseError("expected " + std::to_string(rows) + " rows", line);
    auto row = next_line();
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    const std::size_t sp = row.find(' ');
    if (sp == std::string_view::npos || sp == 0) throw ParseError("expected 'token v1 ... vd'", line);
    entries.emplace_back(std::string(row.substr(0, sp)), 1);
    const char* p = row.data() + sp;
    const char* end = row.data() + row.size();
    for (long long j = 0; j < dim; ++j) {
      while (p < end && *p == ' ') ++p;
      float v = 0.0f;
      const auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc()) throw ParseError("expected " + std::to_string(dim) + " values", line);
      input(i, j) = v;
      p = next;
    }
    while (p < end && *p == ' ') ++p;
    if (p != end) throw ParseError("trailing data after " + std::to_string(dim) + " values", line);
  }
  Embeddings emb;
  try {
    emb.vocab = Vocabulary::ordered(std::move(entries), static_cast<std::uint64_t>(rows));
  } catch (const Error& e) {
    throw ParseError(e.what(), line);
  }
  emb.input = std::move(input);
  emb.context = RowMatrix<float>::Zero(rows, dim);
  return emb;
}

bool is_embedding_binary(std::string_view bytes) { return bytes.starts_with(kMagic); }

std::string to_embedding_binary(const Embeddings& emb) {
  std::string out(kMagic);
  put<std::uint32_t>(out, kEmbeddingBinaryVersion);
  put<std::uint64_t>(out, static_cast<std::uint64_t>(emb.rows()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(emb.dim()));
  put<std::uint64_t>(out, emb.vocab.total_tokens());
  for (Eigen::Index i = 0; i < emb.rows(); ++i) {
    const auto& token = emb.vocab.token(static_cast<std::int32_t>(i));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(token.size()));
    out += token;
    put<std::uint64_t>(out, emb.vocab.count(static_cast<std::int32_t>(i)));
  }
  const auto table_bytes = static_cast<std::size_t>(emb.input.size()) * sizeof(float);
  out.append(reinterpret_cast<const char*>(emb.input.data()), table_bytes);
  out.append(reinterpret_cast<const char*>(emb.context.data()), table_bytes);
  return out;
}

Embeddings from_embedding_binary(std::string_view bytes) {
  if (!is_embedding_binary(bytes)) throw Error("not an embedding binary");
  Reader r(bytes.substr(kMagic.size()));
  const auto version = r.get<std::uint32_t>();
  if (version != kEmbeddingBinaryVersion)
    throw Error("unsupported embedding binary version " + std::to_string(version));
  const auto rows = static_cast<Eigen::Index>(r.get<std::uint64_t>());
  const auto dim = static_cast<Eigen::Index>(r.get<std::uint64_t>());
  const auto total = r.get<std::uint64_t>();
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  entries.reserve(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto len = r.get<std::uint32_t>();
    std::string token(r.take(len));
    entries.emplace_back(std::move(token), r.get<std::uint64_t>());
  }
  Embeddings emb;
  emb.vocab = Vocabulary::ordered(std::move(entries), total);
  emb.input.resize(rows, dim);
  emb.context.resize(rows, dim);
  const auto table_bytes = static_cast<std::size_t>(rows * dim) * sizeof(float);
  std::memcpy(emb.input.data(), r.take(table_bytes).data(), table_bytes);
  std::memcpy(emb.context.data(), r.take(table_bytes).data(), table_bytes);
  if (!r.done()) throw Error("trailing bytes in embedding binary");
  return emb;
}

void write_word_vectors(const Embeddings& emb, const std::filesystem::path& path) {
  spit(path, to_word_vector_text(emb));
}

void write_embedding_binary(const Embeddings& emb, const std::filesystem::path& path) {
  spit(path, to_embedding_binary(emb));
}

Embeddings read_embeddings(const std::filesystem::path& path) {
  const std::string data = slurp(path);
  return is_embedding_binary(data) ? from_embedding_binary(data) : from_word_vector_text(data);
}

}  // namespace corpsim
