#include "memgrow/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "httplib.h"

#include "memgrow/errors.hpp"

namespace memgrow {
namespace {

using json = nlohmann::ordered_json;

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<double> hashed_unit_vector(const std::string& text, std::size_t dim) {
    std::uint64_t state = fnv1a64(text);
    std::vector<double> v(dim);
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        // uniform in [-1, 1)
        v[i] = static_cast<double>(splitmix64(state) >> 11) * (2.0 / 9007199254740992.0) - 1.0;
        norm_sq += v[i] * v[i];
    }
    double norm = std::sqrt(norm_sq);
    if (norm == 0.0) { v[0] = 1.0; norm = 1.0; }
    for (auto& x : v) x /= norm;
    return v;
}

// Splits "http://host:port/path" into (scheme://host:port, /path).
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x00000100000001B3ull;
    }
    return h;
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    if (u.dim() != v.dim())
        throw DomainError("cosine: dimension mismatch (" + std::to_string(u.dim()) + " vs " +
                          std::to_string(v.dim()) + ")");
    if (u.dim() == 0) throw DomainError("cosine: empty vectors");
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.dim(); ++i) {
        dot += u.values[i] * v.values[i];
        nu += u.values[i] * u.values[i];
        nv += v.values[i] * v.values[i];
    }
    if (u.normalized && v.normalized) return dot;
    if (nu == 0.0 || nv == 0.0) throw DomainError("cosine: zero vector");
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

EmbeddingVector normalize(EmbeddingVector v) {
    double norm_sq = 0.0;
    for (double x : v.values) norm_sq += x * x;
    double norm = std::sqrt(norm_sq);
    if (norm == 0.0) throw DomainError("normalize: zero vector");
    for (auto& x : v.values) x /= norm;
    v.normalized = true;
    return v;
}

MockEmbeddingProvider MockEmbeddingProvider::from_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read embedding scenario: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(std::string("embedding scenario parse error: ") + e.what());
    }
    MockEmbeddingProvider provider(doc.value("dim", std::size_t{8}));
    if (doc.contains("vectors")) {
        for (auto& [text, vec] : doc["vectors"].items())
            provider.set_vector(text, vec.get<std::vector<double>>());
    }
    return provider;
}

void MockEmbeddingProvider::set_vector(const std::string& text, std::vector<double> vec) {
    fixed_[text] = std::move(vec);
}

std::vector<std::vector<double>> MockEmbeddingProvider::embed_batch(
    const std::vector<std::string>& inputs) {
    std::vector<std::vector<double>> out;
    out.reserve(inputs.size());
    for (const auto& text : inputs) {
        auto it = fixed_.find(text);
        out.push_back(it != fixed_.end() ? it->second : hashed_unit_vector(text, dim_));
    }
    return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string url, std::string model,
                                             std::string api_key, int max_attempts)
    : url_(std::move(url)), model_(std::move(model)), api_key_(std::move(api_key)),
      max_attempts_(max_attempts) {}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed_batch(
    const std::vector<std::string>& inputs) {
    auto [host, path] = split_url(url_);
    json body;
    body["model"] = model_;
    body["input"] = inputs;
    std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
        httplib::Client client(host);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = "connection failed: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200)
            throw TransportError("embedding provider returned HTTP " + std::to_string(res->status),
                                 attempt);
        json doc;
        try {
            doc = json::parse(res->body);
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed embedding response: ") + e.what());
        }
        std::vector<std::vector<double>> out;
        if (doc.contains("data")) {
            for (const auto& item : doc["data"])
                out.push_back(item.at("embedding").get<std::vector<double>>());
        } else if (doc.contains("embeddings")) {
            for (const auto& item : doc["embeddings"])
                out.push_back(item.get<std::vector<double>>());
        } else {
            throw DataError("embedding response carries neither 'data' nor 'embeddings'");
        }
        if (out.size() != inputs.size())
            throw DataError("embedding response count mismatch");
        return out;
    }
    throw TransportError("embedding provider unreachable after " +
                             std::to_string(max_attempts_) + " attempts: " + last_error,
                         max_attempts_);
}

Embedder::Embedder(std::shared_ptr<EmbeddingProvider> provider, std::string cache_path)
    : provider_(std::move(provider)), cache_path_(std::move(cache_path)) {
    if (!cache_path_.empty()) load_cache();
}

EmbeddingVector Embedder::embed(const std::string& text) {
    if (text.empty()) throw DomainError("embed: empty text");
    std::uint64_t key = fnv1a64(provider_->model_id() + '\0' + text);
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            ++cache_hits_;
            EmbeddingVector v{it->second, true};
            return v;
        }
    }
    auto raw = provider_->embed_batch({text});
    EmbeddingVector v = normalize(EmbeddingVector{raw.at(0), false});
    {
        std::lock_guard lock(mutex_);
        ++provider_calls_;
        cache_[key] = v.values;
    }
    return v;
}

std::vector<EmbeddingVector> Embedder::embed_all(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
}

void Embedder::load_cache() {
    std::ifstream in(cache_path_);
    if (!in) return;  // missing cache is a cold start, not an error
    std::string line;
    std::lock_guard lock(mutex_);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            json rec = json::parse(line);
            cache_[std::stoull(rec.at("key").get<std::string>(), nullptr, 16)] =
                rec.at("vector").get<std::vector<double>>();
        } catch (...) {
            throw DataError("embedding cache parse error: " + cache_path_);
        }
    }
}

void Embedder::save_cache() const {
    if (cache_path_.empty()) return;
    std::ofstream out(cache_path_, std::ios::binary);
    if (!out) throw DataError("cannot write embedding cache: " + cache_path_);
    std::lock_guard lock(mutex_);
    std::vector<std::uint64_t> keys;
    keys.reserve(cache_.size());
    for (const auto& [k, _] : cache_) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    char buf[17];
    for (std::uint64_t k : keys) {
        std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(k));
        json rec;
        rec["key"] = std::string(buf);
        rec["vector"] = cache_.at(k);
        out << rec.dump() << "\n";
    }
}

const Chunk& EmbeddedIndex::chunk_by_id(const std::string& chunk_id) const {
    for (const auto& chunk : corpus.chunks)
        if (chunk.chunk_id == chunk_id) return chunk;
    throw DataError("unknown chunk_id: " + chunk_id);
}

EmbeddedIndex build_index(ChunkCollection collection, Embedder& embedder) {
    EmbeddedIndex index;
    index.embeddings.reserve(collection.chunks.size());
    for (const auto& chunk : collection.chunks) index.embeddings.push_back(embedder.embed(chunk.text));
    index.corpus = std::move(collection);
    return index;
}

std::vector<RetrievalHit> retrieve(const EmbeddingVector& query, const EmbeddedIndex& index,
                                   std::size_t k) {
    if (index.corpus.chunks.empty()) throw ConfigError("retrieve: empty index");
    if (index.embeddings.size() != index.corpus.chunks.size())
        throw ConfigError("retrieve: index not embedded");
    if (k < 1) throw DomainError("retrieve: k must be >= 1");
    std::vector<RetrievalHit> hits;
    hits.reserve(index.corpus.chunks.size());
    for (std::size_t i = 0; i < index.corpus.chunks.size(); ++i)
        hits.push_back({index.corpus.chunks[i].chunk_id, cosine(query, index.embeddings[i])});
    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.chunk_id < b.chunk_id;
    });
    if (hits.size() > k) hits.resize(k);
    return hits;
}

}  // namespace memgrow
