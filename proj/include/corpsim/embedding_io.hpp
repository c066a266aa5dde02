// embedding_io.hpp
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

#include <filesystem>
#include <string>
#include <string_view>

#include "corpsim/sgns.hpp"

namespace corpsim {

/// Plain-text word-vector format: "|V| d" header, then "token v1 ... vd" per
/// row with 6 decimals. Only input vectors are written.
std::string to_word_vector_text(const Embeddings& emb);
/// Context vectors come back zeroed and counts as 1. Throws ParseError.
Embeddings from_word_vector_text(std::string_view text);

inline constexpr std::uint32_t kEmbeddingBinaryVersion = 1;

/// Versioned binary cache holding vocabulary counts and both tables exactly.
std::string to_embedding_binary(const Embeddings& emb);
Embeddings from_embedding_binary(std::string_view bytes);

/// True when the bytes start with the binary cache magic.
bool is_embedding_binary(std::string_view bytes);

void write_word_vectors(const Embeddings& emb, const std::filesystem::path& path);
void write_embedding_binary(const Embeddings& emb, const std::filesystem::path& path);
/// Reads either format, chosen by content.
Embeddings read_embeddings(const std::filesystem::path& path);

}  // namespace corpsim
