#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

#include "memgrow/corpus.hpp"
#include "memgrow/errors.hpp"

using namespace memgrow;

namespace {

std::string make_words(std::size_t n) {
    std::string text;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) text += ' ';
        text += "w" + std::to_string(i);
    }
    return text;
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/memgrow_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("tokenize collapses whitespace") {
    CHECK(tokenize("a b  c") == std::vector<std::string>{"a", "b", "c"});
    CHECK(tokenize("") == std::vector<std::string>{});
    CHECK(tokenize("  \t\n ") == std::vector<std::string>{});
}

TEST_CASE("tokenize splits CJK per codepoint and round-trips") {
    auto tokens = tokenize("北京很大");
    CHECK(tokens == std::vector<std::string>{"北", "京", "很", "大"});
    CHECK(join_tokens(tokens) == "北京很大");
    CHECK(tokenize(join_tokens(tokens)) == tokens);
}

TEST_CASE("tokenize splits punctuation") {
    CHECK(tokenize("don't stop.") == std::vector<std::string>{"don", "'", "t", "stop", "."});
    auto tokens = tokenize("hello, world (2024)!");
    CHECK(tokenize(join_tokens(tokens)) == tokens);
}

TEST_CASE("ingest chunk counts") {
    SUBCASE("600 tokens at 256") {
        auto corpus = ingest({{"d1", make_words(600), ""}}, 256);
        REQUIRE(corpus.chunks.size() == 3);
        CHECK(corpus.chunks[0].tokens == 256);
        CHECK(corpus.chunks[1].tokens == 256);
        CHECK(corpus.chunks[2].tokens == 88);
        CHECK(corpus.chunks[0].ordinal == 0);
        CHECK(corpus.chunks[2].ordinal == 2);
    }
    SUBCASE("exact boundary") {
        auto corpus = ingest({{"d1", make_words(256), ""}}, 256);
        REQUIRE(corpus.chunks.size() == 1);
        CHECK(corpus.chunks[0].tokens == 256);
    }
    SUBCASE("under-size documents") {
        auto corpus = ingest({{"a", make_words(10), ""}, {"b", make_words(10), ""}}, 256);
        REQUIRE(corpus.chunks.size() == 2);
        CHECK(corpus.chunks[0].doc_id == "a");
        CHECK(corpus.chunks[1].doc_id == "b");
    }
}

TEST_CASE("ingest rejects bad input") {
    CHECK_THROWS_AS(ingest({{"d1", "   ", ""}}, 16), DataError);
    CHECK_THROWS_AS(ingest({{"d1", "x", ""}, {"d1", "y", ""}}, 16), DataError);
    CHECK_THROWS_AS(ingest({}, 16), DataError);
    CHECK_THROWS_AS(ingest({{"d1", "x", ""}}, 0), ConfigError);
    CHECK_THROWS_WITH_AS(ingest({{"dup", "x", ""}, {"dup", "y", ""}}, 16),
                         doctest::Contains("dup"), DataError);
}

TEST_CASE("chunk join reconstruction property") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> len(1, 700);
    std::uniform_int_distribution<int> word(0, 50);
    for (int trial = 0; trial < 30; ++trial) {
        std::string text;
        int n = len(rng);
        for (int i = 0; i < n; ++i) {
            if (i > 0) text += ' ';
            text += "t" + std::to_string(word(rng));
        }
        auto corpus = ingest({{"doc", text, ""}}, 64);
        std::vector<std::string> rejoined;
        for (const auto& chunk : corpus.chunks) {
            auto tokens = tokenize(chunk.text);
            CHECK(tokens.size() == chunk.tokens);
            rejoined.insert(rejoined.end(), tokens.begin(), tokens.end());
        }
        CHECK(rejoined == tokenize(text));
        CHECK(corpus.chunks.size() == (tokenize(text).size() + 63) / 64);
    }
}

TEST_CASE("corpus persistence round-trip") {
    TempFile file("corpus.jsonl");
    auto corpus = ingest({{"d1", make_words(70), ""}, {"d2", "北京很大", ""}}, 32);
    save_corpus(corpus, file.path);
    auto loaded = load_corpus(file.path);
    CHECK(loaded == corpus);
}

TEST_CASE("corpus load failure modes") {
    TempFile file("corpus_bad.jsonl");
    SUBCASE("truncated record") {
        std::ofstream out(file.path);
        out << "{\"schema\":\"memgrow-corpus/1\"}\n{\"chunk_id\":\"x\",\"doc\n";
        out.close();
        CHECK_THROWS_WITH_AS(load_corpus(file.path), doctest::Contains("line 2"), DataError);
    }
    SUBCASE("unknown schema version") {
        std::ofstream out(file.path);
        out << "{\"schema\":\"memgrow-corpus/99\"}\n";
        out.close();
        CHECK_THROWS_WITH_AS(load_corpus(file.path), doctest::Contains("schema"), DataError);
    }
    SUBCASE("empty file") {
        std::ofstream out(file.path);
        out.close();
        CHECK_THROWS_AS(load_corpus(file.path), DataError);
    }
}
