#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"

#include "memgrow/corpus.hpp"
#include "memgrow/embedding.hpp"
#include "memgrow/errors.hpp"

using namespace memgrow;

namespace {

EmbeddingVector vec(std::vector<double> values) {
    return normalize(EmbeddingVector{std::move(values), false});
}

}  // namespace

TEST_CASE("cosine identities") {
    auto u = vec({0.6, 0.8});
    auto e1 = vec({1.0, 0.0});
    auto e2 = vec({0.0, 1.0});
    CHECK(cosine(u, u) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine(e1, e2) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cosine(u, e1) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(cosine(u, e1) == doctest::Approx(cosine(e1, u)).epsilon(1e-12));
}

TEST_CASE("cosine rejects bad input") {
    CHECK_THROWS_AS(cosine(vec({1, 0}), vec({1, 0, 0})), DomainError);
    EmbeddingVector zero{{0.0, 0.0}, false};
    CHECK_THROWS_AS(cosine(zero, EmbeddingVector{{1.0, 0.0}, false}), DomainError);
    CHECK_THROWS_AS(normalize(zero), DomainError);
}

TEST_CASE("normalization is idempotent") {
    std::mt19937 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        EmbeddingVector v;
        for (int i = 0; i < 8; ++i) v.values.push_back(gauss(rng));
        auto once = normalize(v);
        auto twice = normalize(once);
        for (std::size_t i = 0; i < once.dim(); ++i)
            CHECK(std::abs(once.values[i] - twice.values[i]) <= 1e-9);
        double norm = 0.0;
        for (double x : once.values) norm += x * x;
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("embedder caches by content") {
    auto provider = std::make_shared<MockEmbeddingProvider>(3);
    Embedder embedder(provider);
    auto a1 = embedder.embed("same text");
    auto a2 = embedder.embed("same text");
    CHECK(a1.values == a2.values);
    CHECK(embedder.provider_calls() == 1);
    CHECK(embedder.cache_hits() == 1);
}

TEST_CASE("embedder cache persists") {
    std::string path = "/tmp/memgrow_test_embed_cache.jsonl";
    std::remove(path.c_str());
    std::vector<double> first;
    {
        Embedder embedder(std::make_shared<MockEmbeddingProvider>(4), path);
        first = embedder.embed("persist me").values;
        embedder.save_cache();
    }
    {
        Embedder embedder(std::make_shared<MockEmbeddingProvider>(4), path);
        embedder.load_cache();
        CHECK(embedder.embed("persist me").values == first);
        CHECK(embedder.provider_calls() == 0);
    }
    std::remove(path.c_str());
}

TEST_CASE("mock provider pinned vs hashed vectors") {
    MockEmbeddingProvider provider(2);
    provider.set_vector("a", {1.0, 0.0});
    provider.set_vector("b", {0.0, 1.0});
    auto out = provider.embed_batch({"a", "b", "unpinned"});
    REQUIRE(out.size() == 3);
    CHECK(out[0] == std::vector<double>{1.0, 0.0});
    CHECK(out[1] == std::vector<double>{0.0, 1.0});
    CHECK(out[2].size() == 2);
    CHECK(out[2] == provider.embed_batch({"unpinned"})[0]);
}

TEST_CASE("retrieve matches brute-force argsort") {
    auto provider = std::make_shared<MockEmbeddingProvider>(2);
    std::vector<std::pair<std::string, std::vector<double>>> chunks = {
        {"c1 north", {0.0, 1.0}},  {"c2 east", {1.0, 0.0}},       {"c3 diag", {1.0, 1.0}},
        {"c4 south", {0.0, -1.0}}, {"c5 shallow", {1.0, 0.2}},
    };
    std::vector<Document> docs;
    for (const auto& [text, v] : chunks) {
        provider->set_vector(text, v);
        docs.push_back({"doc-" + std::to_string(docs.size()), text, ""});
    }
    Embedder embedder(provider);
    auto index = build_index(ingest(docs, 64), embedder);
    auto query = embedder.embed("c2 east");

    std::vector<std::pair<double, std::string>> expected;
    for (std::size_t i = 0; i < index.corpus.chunks.size(); ++i)
        expected.push_back({cosine(query, index.embeddings[i]), index.corpus.chunks[i].chunk_id});
    std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });

    auto top3 = retrieve(query, index, 3);
    REQUIRE(top3.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(top3[i].chunk_id == expected[i].second);
        CHECK(top3[i].score == doctest::Approx(expected[i].first).epsilon(1e-12));
    }
    CHECK(top3[0].score == doctest::Approx(1.0).epsilon(1e-12));  // self-match

    SUBCASE("k clamps to corpus size") {
        auto all = retrieve(query, index, 50);
        CHECK(all.size() == index.corpus.chunks.size());
    }
    SUBCASE("smaller k is a prefix of larger k") {
        auto k2 = retrieve(query, index, 2);
        auto k4 = retrieve(query, index, 4);
        for (std::size_t i = 0; i < k2.size(); ++i) CHECK(k2[i].chunk_id == k4[i].chunk_id);
    }
}
