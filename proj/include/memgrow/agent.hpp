#pragma once

#include <optional>
#include <string>
#include <vector>

#include "memgrow/embedding.hpp"
#include "memgrow/engine.hpp"
#include "memgrow/grower.hpp"
#include "memgrow/llm.hpp"
#include "memgrow/seeds.hpp"

namespace memgrow {

enum class AgentMode { Full, NoRetrace, NoMemory };

std::string to_string(AgentMode mode);
AgentMode agent_mode_from_string(const std::string& name);

struct AgentConfig {
    int n_max{5};
    std::size_t top_k{3};
    AgentMode mode{AgentMode::Full};
    ScoringConfig scoring;
    PromptBundle prompts;
    bool multiple_choice{false};
    std::vector<std::string> choices;  // A..D texts when multiple_choice
};

struct TokenLedgerEntry {
    std::string call;
    long prompt_tokens{0};
    long completion_tokens{0};
};

struct RoundRecord {
    int round{0};
    std::string reasoning;
    std::string query;
    std::vector<RetrievalHit> hits;
    SeedSet seeds;
    std::vector<MemoryFragment> fragments;
};

struct Session {
    std::string original_query;
    AgentMode mode{AgentMode::Full};
    std::vector<RoundRecord> rounds;
    std::string transcript;  // reasoning with spliced search-result blocks
    std::vector<ContributionScore> scores;
    MemoryRegion region;
    MemoryPath path;
    std::vector<GreedyTraceStep> greedy_trace;
    std::string answer_prompt;
    std::string answer;
    bool answer_warning{false};
    std::vector<std::string> warnings;
    std::string error;  // non-empty when the session aborted
    std::vector<TokenLedgerEntry> token_ledger;

    std::vector<MemoryFragment> consolidated() const;  // union over rounds
    long total_prompt_tokens() const;
    long total_completion_tokens() const;
};

struct AgentServices {
    const EmbeddedIndex* index{nullptr};
    Embedder* embedder{nullptr};
    PosTagger* tagger{nullptr};
    ChatProvider* gateway{nullptr};
};

Session run(const std::string& question, const AgentConfig& config, const AgentServices& services);

// Text strictly between the LAST begin/end marker pair, trimmed.
std::string extract_marked_query(const std::string& reasoning);

struct ExtractedAnswer {
    std::string text;
    bool warning{false};  // set when the fallback (full completion) was used
};

ExtractedAnswer extract_answer(const std::string& completion, bool multiple_choice = false);

std::string session_to_json(const Session& session, const AgentConfig& config);
Session session_from_json(const std::string& text);

}  // namespace memgrow
