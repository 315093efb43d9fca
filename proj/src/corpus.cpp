#include "memgrow/corpus.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "memgrow/errors.hpp"

namespace memgrow {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kCorpusSchema = "memgrow-corpus/1";

bool is_cjk(char32_t cp) {
    return (cp >= 0x2E80 && cp <= 0x2EFF) ||   // CJK radicals
           (cp >= 0x3040 && cp <= 0x30FF) ||   // hiragana, katakana
           (cp >= 0x3400 && cp <= 0x4DBF) ||   // CJK ext A
           (cp >= 0x4E00 && cp <= 0x9FFF) ||   // CJK unified
           (cp >= 0xF900 && cp <= 0xFAFF) ||   // CJK compat
           (cp >= 0x20000 && cp <= 0x2FA1F);   // CJK ext B+
}

bool is_space_cp(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
           cp == '\v' || cp == 0x00A0 || cp == 0x3000;
}

bool is_ascii_punct(char32_t cp) {
    return cp < 128 && !(cp >= '0' && cp <= '9') && !(cp >= 'a' && cp <= 'z') &&
           !(cp >= 'A' && cp <= 'Z') && !is_space_cp(cp);
}

// Decodes the UTF-8 codepoint at byte offset i; advances i past it.
// Malformed bytes are passed through as single-byte codepoints.
char32_t next_codepoint(const std::string& s, std::size_t& i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = c;
    if (c >= 0xF0) { len = 4; cp = c & 0x07; }
    else if (c >= 0xE0) { len = 3; cp = c & 0x0F; }
    else if (c >= 0xC0) { len = 2; cp = c & 0x1F; }
    if (i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
        unsigned char cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) { len = k; cp = c; break; }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += len;
    if (len == 1) cp = c;
    return cp;
}

char32_t first_codepoint(const std::string& s) {
    std::size_t i = 0;
    return next_codepoint(s, i);
}

char32_t last_codepoint(const std::string& s) {
    std::size_t i = 0;
    char32_t cp = 0;
    while (i < s.size()) cp = next_codepoint(s, i);
    return cp;
}

bool is_punct_token(const std::string& tok) {
    std::size_t i = 0;
    char32_t cp = next_codepoint(tok, i);
    return i == tok.size() && is_ascii_punct(cp);
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t i = 0;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(current);
            current.clear();
        }
    };
    while (i < text.size()) {
        std::size_t start = i;
        char32_t cp = next_codepoint(text, i);
        std::string unit = text.substr(start, i - start);
        if (is_space_cp(cp)) {
            flush();
        } else if (is_cjk(cp) || is_ascii_punct(cp)) {
            flush();
            tokens.push_back(unit);
        } else {
            current += unit;
        }
    }
    flush();
    return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) {
            const std::string& prev = tokens[i - 1];
            const std::string& cur = tokens[i];
            bool splits_anyway = is_cjk(last_codepoint(prev)) || is_cjk(first_codepoint(cur)) ||
                                 is_punct_token(prev) || is_punct_token(cur);
            if (!splits_anyway) out += ' ';
        }
        out += tokens[i];
    }
    return out;
}

std::size_t count_tokens(const std::string& text) {
    return tokenize(text).size();
}

ChunkCollection ingest(const std::vector<Document>& documents, std::size_t chunk_size) {
    if (chunk_size < 1) throw ConfigError("chunk_size must be >= 1");
    if (documents.empty()) throw DataError("no documents to ingest");

    std::set<std::string> seen_ids;
    std::vector<std::string> problems;
    for (const auto& doc : documents) {
        if (!seen_ids.insert(doc.doc_id).second)
            throw DataError("duplicate doc_id: " + doc.doc_id);
        std::string trimmed = doc.text;
        trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
        if (trimmed.empty()) problems.push_back(doc.doc_id + ": empty text");
    }
    if (!problems.empty()) {
        std::string msg = "documents rejected:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw DataError(msg);
    }

    ChunkCollection collection;
    collection.chunk_size = chunk_size;
    for (const auto& doc : documents) {
        std::vector<std::string> tokens = tokenize(doc.text);
        std::size_t ordinal = 0;
        for (std::size_t off = 0; off < tokens.size(); off += chunk_size, ++ordinal) {
            std::size_t n = std::min(chunk_size, tokens.size() - off);
            std::vector<std::string> slice(tokens.begin() + off, tokens.begin() + off + n);
            Chunk chunk;
            chunk.doc_id = doc.doc_id;
            chunk.ordinal = ordinal;
            chunk.tokens = n;
            chunk.text = join_tokens(slice);
            chunk.chunk_id = doc.doc_id + "#" + std::to_string(ordinal);
            collection.chunks.push_back(std::move(chunk));
        }
    }
    return collection;
}

void save_corpus(const ChunkCollection& collection, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write corpus file: " + path);
    json header;
    header["schema"] = kCorpusSchema;
    header["chunk_size"] = collection.chunk_size;
    out << header.dump() << "\n";
    for (const auto& chunk : collection.chunks) {
        json rec;
        rec["chunk_id"] = chunk.chunk_id;
        rec["doc_id"] = chunk.doc_id;
        rec["ordinal"] = chunk.ordinal;
        rec["tokens"] = chunk.tokens;
        rec["text"] = chunk.text;
        out << rec.dump() << "\n";
    }
}

ChunkCollection load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read corpus file: " + path);
    std::string line;
    std::size_t lineno = 0;
    ChunkCollection collection;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("corpus parse error at line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!saw_header) {
            if (!rec.contains("schema") || !rec["schema"].is_string())
                throw DataError("corpus parse error at line 1: missing schema header");
            if (rec["schema"] != kCorpusSchema)
                throw DataError("unsupported corpus schema version: " + rec["schema"].get<std::string>());
            collection.chunk_size = rec.value("chunk_size", std::size_t{0});
            saw_header = true;
            continue;
        }
        try {
            Chunk chunk;
            chunk.chunk_id = rec.at("chunk_id").get<std::string>();
            chunk.doc_id = rec.at("doc_id").get<std::string>();
            chunk.ordinal = rec.at("ordinal").get<std::size_t>();
            chunk.tokens = rec.at("tokens").get<std::size_t>();
            chunk.text = rec.at("text").get<std::string>();
            collection.chunks.push_back(std::move(chunk));
        } catch (const json::exception& e) {
            throw DataError("corpus parse error at line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!saw_header) throw DataError("corpus parse error: empty file");
    return collection;
}

}  // namespace memgrow
