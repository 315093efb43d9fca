#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <vector>

#include "memgrow/embedding.hpp"
#include "memgrow/llm.hpp"
#include "memgrow/seeds.hpp"

namespace memgrow {

struct MemoryFragment {
    std::string fragment_id;
    std::string text;
    SeedCategory category{SeedCategory::Subjects};
    int round{1};
    std::string source_query;
    double own_query_relevance{0.0};  // cosine vs. the query of the growth round
    EmbeddingVector embedding;
};

struct GrowthRequest {
    SeedSet seeds;
    std::vector<std::string> documents;  // retrieved chunk texts, deduplicated per round
    std::string query;
    int round{1};
};

struct GrowthResult {
    std::vector<MemoryFragment> fragments;
    std::vector<std::string> warnings;
    long prompt_tokens{0};
    long completion_tokens{0};
};

// Total parser for the category-prefixed line format. Unmatched lines are
// ignored; bracketed payloads are stripped; empty payloads dropped.
std::vector<std::pair<SeedCategory, std::string>> parse_fragments(const std::string& completion);

std::string build_growth_prompt(const GrowthRequest& request, const std::string& instruction);

// Session-scoped fragment id allocator.
class FragmentIdGen {
public:
    std::string next() { return "f" + std::to_string(++counter_); }

private:
    std::size_t counter_{0};
};

GrowthResult grow(const GrowthRequest& request, ChatProvider& gateway, Embedder& embedder,
                  const std::string& instruction, FragmentIdGen& ids);

}  // namespace memgrow
