#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace memgrow {

// Marker literals of the search protocol.
inline constexpr const char* kBeginSearchQuery = "<|begin_search_query|>";
inline constexpr const char* kEndSearchQuery = "<|end_search_query|>";
inline constexpr const char* kBeginSearchResult = "<|begin_search_result|>";
inline constexpr const char* kEndSearchResult = "<|end_search_result|>";

struct PromptBundle {
    std::string reasoning_instruction;   // placeholders: MAX_SEARCH_LIMIT
    std::string growth_instruction;      // placeholders: SEED_LIST, TEXT, QUERY
    std::string answer_instruction;      // placeholders: SYSTEM_MEMORY, QUESTION
    std::string mc_instruction;          // placeholders: CONTEXTS, QUERY, CHOICE_A..D
};

PromptBundle default_prompts();

// Exact substitution of {NAME} placeholders; "{{"/"}}" escape literal braces.
std::string render(const std::string& tmpl, const std::map<std::string, std::string>& bindings);

struct ChatMessage {
    std::string role;
    std::string content;
};

enum class FinishKind { Stop, Length, Marker };

std::string to_string(FinishKind kind);

struct ChatExchange {
    std::vector<ChatMessage> messages;
    std::string completion;
    FinishKind finish_kind{FinishKind::Stop};
    long prompt_tokens{0};
    long completion_tokens{0};
    int attempts{1};
};

struct RawCompletion {
    std::string text;
    long prompt_tokens{-1};      // -1 when the provider reports no usage
    long completion_tokens{-1};
    int attempts{1};
};

class ChatProvider {
public:
    virtual ~ChatProvider() = default;
    virtual RawCompletion complete_raw(const std::vector<ChatMessage>& messages,
                                       const std::vector<std::string>& stop) = 0;
};

// Scripted provider: ordered rules matched against the last user message.
// The first matching rule fires; rules marked `once` are consumed.
class MockChatProvider : public ChatProvider {
public:
    struct Rule {
        std::string match;
        std::string response;
        bool once{false};
        bool used{false};
    };

    MockChatProvider() = default;
    explicit MockChatProvider(std::vector<Rule> rules) : rules_(std::move(rules)) {}
    MockChatProvider(MockChatProvider&& other) noexcept : rules_(std::move(other.rules_)) {}
    static MockChatProvider from_scenario_file(const std::string& path);

    void add_rule(std::string match, std::string response, bool once = false);
    RawCompletion complete_raw(const std::vector<ChatMessage>& messages,
                               const std::vector<std::string>& stop) override;

private:
    std::mutex mutex_;
    std::vector<Rule> rules_;
};

// OpenAI-style chat completions endpoint.
class HttpChatProvider : public ChatProvider {
public:
    HttpChatProvider(std::string url, std::string model, std::string api_key = "",
                     double temperature = 0.0, int max_attempts = 3);
    RawCompletion complete_raw(const std::vector<ChatMessage>& messages,
                               const std::vector<std::string>& stop) override;

private:
    std::string url_;
    std::string model_;
    std::string api_key_;
    double temperature_;
    int max_attempts_;
};

// Truncates the completion at the first stop marker (marker retained).
// Token counts fall back to the corpus tokenizer when the provider is silent.
ChatExchange complete(const std::vector<ChatMessage>& messages, ChatProvider& provider,
                      const std::vector<std::string>& stop_markers);

}  // namespace memgrow
