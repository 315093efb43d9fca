#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "memgrow/corpus.hpp"

namespace memgrow {

struct EmbeddingVector {
    std::vector<double> values;
    bool normalized{false};

    std::size_t dim() const { return values.size(); }
};

double cosine(const EmbeddingVector& u, const EmbeddingVector& v);
EmbeddingVector normalize(EmbeddingVector v);

std::uint64_t fnv1a64(const std::string& data);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& inputs) = 0;
    virtual std::string model_id() const = 0;
};

// Scenario-driven deterministic provider. Exact-string entries win; anything
// else gets a hash-seeded pseudo-random unit vector of the configured dim.
class MockEmbeddingProvider : public EmbeddingProvider {
public:
    explicit MockEmbeddingProvider(std::size_t dim) : dim_(dim) {}
    static MockEmbeddingProvider from_scenario_file(const std::string& path);

    void set_vector(const std::string& text, std::vector<double> vec);
    std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& inputs) override;
    std::string model_id() const override { return "mock-embed"; }

private:
    std::size_t dim_;
    std::unordered_map<std::string, std::vector<double>> fixed_;
};

// OpenAI-style embeddings endpoint: POST {"model":..., "input":[...]}.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    HttpEmbeddingProvider(std::string url, std::string model, std::string api_key = "",
                          int max_attempts = 3);
    std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& inputs) override;
    std::string model_id() const override { return model_; }

private:
    std::string url_;
    std::string model_;
    std::string api_key_;
    int max_attempts_;
};

// Content-addressed cache keyed by fnv1a64(model + '\0' + text).
// Thread-safe; persisted as JSONL beside the corpus.
class Embedder {
public:
    explicit Embedder(std::shared_ptr<EmbeddingProvider> provider, std::string cache_path = "");

    EmbeddingVector embed(const std::string& text);
    std::vector<EmbeddingVector> embed_all(const std::vector<std::string>& texts);

    void load_cache();
    void save_cache() const;
    std::size_t cache_hits() const { return cache_hits_; }
    std::size_t provider_calls() const { return provider_calls_; }

private:
    std::shared_ptr<EmbeddingProvider> provider_;
    std::string cache_path_;
    mutable std::mutex mutex_;
    std::unordered_map<std::uint64_t, std::vector<double>> cache_;
    std::size_t cache_hits_{0};
    std::size_t provider_calls_{0};
};

struct RetrievalHit {
    std::string chunk_id;
    double score{0.0};
};

struct EmbeddedIndex {
    ChunkCollection corpus;
    std::vector<EmbeddingVector> embeddings;  // parallel to corpus.chunks

    const Chunk& chunk_by_id(const std::string& chunk_id) const;
};

EmbeddedIndex build_index(ChunkCollection collection, Embedder& embedder);

// Flat exhaustive scan; hits sorted by score desc, ties by chunk_id asc.
std::vector<RetrievalHit> retrieve(const EmbeddingVector& query, const EmbeddedIndex& index,
                                   std::size_t k);

}  // namespace memgrow
