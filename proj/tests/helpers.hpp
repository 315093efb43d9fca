#pragma once

// Shared fixtures: a 5-chunk toy corpus, a pinned mock embedder, and scripted
// chat scenarios driving the search loop deterministically.

#include <algorithm>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "memgrow/agent.hpp"
#include "memgrow/corpus.hpp"
#include "memgrow/embedding.hpp"
#include "memgrow/engine.hpp"
#include "memgrow/llm.hpp"

namespace memgrow::testing {

inline const char* kToyQuestion =
    "Alice David is the voice of Lara Croft in a video game developed by which company?";

inline std::vector<Document> toy_documents() {
    return {
        {"d1", "Alice David is the voice of Lara Croft in Tomb Raider.", ""},
        {"d2", "Tomb Raider was developed by Crystal Dynamics in 2013.", ""},
        {"d3", "Paris is the capital of France.", ""},
        {"d4", "The Eiffel Tower was completed in 1889.", ""},
        {"d5", "Bananas are rich in potassium.", ""},
    };
}

// Embeddings pinned so the grown fragments score far above tau_r = 0.3.
inline std::shared_ptr<MockEmbeddingProvider> toy_embedder_provider() {
    auto provider = std::make_shared<MockEmbeddingProvider>(4);
    provider->set_vector(kToyQuestion, {1.0, 0.1, 0.0, 0.0});
    provider->set_vector("Alice David Lara Croft voice", {1.0, 0.2, 0.0, 0.0});
    provider->set_vector("Alice David is the voice of Lara Croft in Tomb Raider",
                         {0.9, 0.2, 0.1, 0.0});
    provider->set_vector("developed by Crystal Dynamics", {0.8, 0.3, 0.1, 0.0});
    provider->set_vector("in 2013", {0.7, 0.2, 0.3, 0.0});
    // chunk texts, pinned so retrieval ranks d1 > d2 > d3 for the toy query
    provider->set_vector("Alice David is the voice of Lara Croft in Tomb Raider.",
                         {1.0, 0.15, 0.0, 0.0});
    provider->set_vector("Tomb Raider was developed by Crystal Dynamics in 2013.",
                         {0.9, 0.25, 0.0, 0.0});
    provider->set_vector("Paris is the capital of France.", {0.0, 1.0, 0.0, 0.0});
    provider->set_vector("The Eiffel Tower was completed in 1889.", {0.0, 0.0, 1.0, 0.0});
    provider->set_vector("Bananas are rich in potassium.", {0.0, 0.0, 0.0, 1.0});
    return provider;
}

inline std::string round1_reasoning() {
    return "I need to find the game first.\n<|begin_search_query|>Alice David Lara Croft "
           "voice<|end_search_query|>";
}

inline std::string growth_response() {
    return "subjects: [Alice David is the voice of Lara Croft in Tomb Raider]\n"
           "actions: [developed by Crystal Dynamics]\n"
           "temporal markers: [in 2013]";
}

// Two search-capable turns: round 1 raises a query, round 2 stops naturally.
inline MockChatProvider toy_chat_provider() {
    std::vector<MockChatProvider::Rule> rules;
    rules.push_back({"- Query:", growth_response(), false, false});
    rules.push_back({"System memory:", "The answer is \\boxed{Crystal Dynamics}.", false, false});
    rules.push_back({"Question:", round1_reasoning(), true, false});
    rules.push_back({"<|begin_search_result|>",
                     "The search results show the developer. I can answer now.", true, false});
    return MockChatProvider(std::move(rules));
}

// Never stops searching on its own; only the round budget ends the loop.
inline MockChatProvider always_searching_provider() {
    std::vector<MockChatProvider::Rule> rules;
    rules.push_back({"- Query:", growth_response(), false, false});
    rules.push_back({"System memory:", "\\boxed{budget exhausted}", false, false});
    rules.push_back({"", "<|begin_search_query|>Alice David Lara Croft voice<|end_search_query|>",
                     false, false});
    return MockChatProvider(std::move(rules));
}

struct ToyHarness {
    Embedder embedder;
    EmbeddedIndex index;
    RuleTagger tagger;

    ToyHarness()
        : embedder(toy_embedder_provider()),
          index(build_index(ingest(toy_documents(), 64), embedder)) {}

    AgentServices services(ChatProvider& gateway) {
        return {&index, &embedder, &tagger, &gateway};
    }
};

inline AgentConfig toy_config() {
    AgentConfig config;
    config.prompts = default_prompts();
    return config;
}

inline MemoryFragment make_fragment(std::string id, std::vector<double> embedding,
                                    double own_query_relevance, int round = 1) {
    MemoryFragment fragment;
    fragment.fragment_id = std::move(id);
    fragment.text = "fragment " + fragment.fragment_id;
    fragment.round = round;
    fragment.own_query_relevance = own_query_relevance;
    fragment.embedding = normalize(EmbeddingVector{std::move(embedding), false});
    return fragment;
}

inline EmbeddingVector random_unit(std::mt19937& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    EmbeddingVector v;
    for (std::size_t i = 0; i < dim; ++i) v.values.push_back(gauss(rng));
    return normalize(v);
}

inline std::vector<MemoryFragment> random_fragments(std::mt19937& rng, std::size_t count,
                                                    std::size_t dim) {
    std::uniform_real_distribution<double> rel(-1.0, 1.0);
    std::vector<MemoryFragment> fragments;
    for (std::size_t i = 0; i < count; ++i) {
        MemoryFragment fragment;
        fragment.fragment_id = "f" + std::to_string(i + 1);
        fragment.text = "fragment " + fragment.fragment_id;
        fragment.round = static_cast<int>(i / 3) + 1;
        fragment.own_query_relevance = rel(rng);
        fragment.embedding = random_unit(rng, dim);
        fragments.push_back(std::move(fragment));
    }
    return fragments;
}

// Straight-line recomputation of the contribution scores, kept deliberately
// naive so it can double-check the engine.
inline std::vector<ContributionScore> reference_scores(
    const std::vector<MemoryFragment>& fragments, const EmbeddingVector& query,
    const ScoringConfig& config) {
    std::vector<ContributionScore> out;
    for (std::size_t i = 0; i < fragments.size(); ++i) {
        ContributionScore row;
        row.fragment_id = fragments[i].fragment_id;
        row.c_rel = cosine(fragments[i].embedding, query);
        row.bp_weight = std::max(0.0, fragments[i].own_query_relevance - config.tau_s);
        double numerator = 0.0;
        double denominator = 0.0;
        for (std::size_t j = 0; j < fragments.size(); ++j) {
            if (j == i) continue;
            double weight = std::max(0.0, fragments[j].own_query_relevance - config.tau_s);
            numerator += cosine(fragments[i].embedding, fragments[j].embedding) * weight;
            denominator += weight;
        }
        row.c_bp = denominator > 0.0 ? numerator / denominator : 0.0;
        row.c = config.alpha * row.c_rel + config.beta * row.c_bp;
        out.push_back(row);
    }
    return out;
}

// The worked three-fragment instance used to pin the greedy trace.
inline std::vector<PathCandidate> abc_candidates() {
    return {{"A", 1, 0.9}, {"B", 1, 0.8}, {"C", 1, 0.7}};
}

inline SimilarityFn abc_similarity() {
    return [](std::size_t i, std::size_t j) {
        static const double sim[3][3] = {{1.0, 0.9, 0.2}, {0.9, 1.0, 0.8}, {0.2, 0.8, 1.0}};
        return sim[i][j];
    };
}

}  // namespace memgrow::testing
