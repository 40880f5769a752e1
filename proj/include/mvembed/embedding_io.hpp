#pragma once

#include <filesystem>
#include <iosfwd>

#include "mvembed/embedding.hpp"

namespace mvembed {

// Text: "<|U|> <D>" header, then "label v1 ... vD" per node (shortest round-trip decimals).
void write_embedding_text(std::ostream& out, const EmbeddingTable& table);
EmbeddingTable read_embedding_text(std::istream& in, const std::string& source = "<stream>");

// Binary, little-endian: 8-byte magic "MVEMBED1", u32 |U|, u32 D, then per node
// u32 label length, label bytes, D float64 values.
void write_embedding_binary(std::ostream& out, const EmbeddingTable& table);
EmbeddingTable read_embedding_binary(std::istream& in);

void save_embedding(const std::filesystem::path& path, const EmbeddingTable& table);
// Detects the binary magic, otherwise parses text.
EmbeddingTable load_embedding(const std::filesystem::path& path);

}  // namespace mvembed
