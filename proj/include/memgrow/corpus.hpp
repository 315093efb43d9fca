#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace memgrow {

struct Document {
    std::string doc_id;
    std::string text;
    std::string source_tag;  // optional, empty when absent
};

struct Chunk {
    std::string chunk_id;
    std::string doc_id;
    std::size_t ordinal{0};  // 0-based position within the document
    std::size_t tokens{0};
    std::string text;

    bool operator==(const Chunk&) const = default;
};

struct ChunkCollection {
    std::size_t chunk_size{0};
    std::vector<Chunk> chunks;

    bool operator==(const ChunkCollection&) const = default;
};

// Deterministic segmentation: whitespace split plus punctuation split for
// space-delimited scripts, per-codepoint tokens for CJK. join_tokens inverts
// it at the token-sequence level (tokenize(join_tokens(t)) == t) and
// reproduces CJK-only input byte for byte.
std::vector<std::string> tokenize(const std::string& text);
std::string join_tokens(const std::vector<std::string>& tokens);

std::size_t count_tokens(const std::string& text);

ChunkCollection ingest(const std::vector<Document>& documents, std::size_t chunk_size);

void save_corpus(const ChunkCollection& collection, const std::string& path);
ChunkCollection load_corpus(const std::string& path);

}  // namespace memgrow
