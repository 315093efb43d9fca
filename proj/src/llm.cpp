#include "memgrow/llm.hpp"

#include <fstream>

#include "json.hpp"

#include "httplib.h"

#include "memgrow/corpus.hpp"
#include "memgrow/errors.hpp"

namespace memgrow {
namespace {

using json = nlohmann::ordered_json;

const char* kReasoningInstruction =
    "You are a reasoning assistant with the ability to perform searches to help you answer the "
    "user's question accurately. When answering, just give the answer and do not output other "
    "information.\n"
    "You have special tools:\n"
    "- To perform a search: write <|begin_search_query|> your query here <|end_search_query|>.\n"
    "Then, the system will search and analyze relevant passages, then provide you with helpful "
    "information in the format <|begin_search_result|> ...search results... "
    "<|end_search_result|>.\n"
    "If you think the searched information is not enough, you can continue searching. The maximum "
    "number of search attempts is limited to {MAX_SEARCH_LIMIT}.\n"
    "Once you have all the information you need, stop the search and continue your reasoning.\n"
    "Example:\n"
    "Question: \"Alice David is the voice of Lara Croft in a video game developed by which "
    "company?\"\n"
    "Assistant thinking steps:\n"
    "- I need to find out who voices Lara Croft in the video game.\n"
    "- Then, I need to determine which company developed that video game.\n"
    "Assistant:\n"
    "<|begin_search_query|>Alice David Lara Croft voice<|end_search_query|>\n"
    "(System returns processed information from relevant passages)\n"
    "Assistant thinks: The search results indicate that Alice David is the voice of Lara Croft in "
    "a specific video game. Now, I need to find out which company developed that game.\n"
    "Assistant:\n"
    "<|begin_search_query|>video game developed by Alice David Lara Croft<|end_search_query|>\n"
    "(System returns processed information from relevant passages)\n"
    "Assistant continues reasoning with the new information...\n"
    "Remember:\n"
    "- Use <|begin_search_query|> to request a search and end with <|end_search_query|>.\n"
    "- When done searching, continue your reasoning.\n";

const char* kGrowthInstruction =
    "Please extract content from the provided text that is useful for answering the given query, "
    "specifically with respect to the listed subjects, actions, temporal markers, degree "
    "modifiers.\n"
    "\n"
    "Input:\n"
    "- List of subjects, actions, temporal markers, degree modifiers:\n"
    "{SEED_LIST}\n"
    "- Text:\n"
    "{TEXT}\n"
    "- Query: {QUERY}\n"
    "\n"
    "Instructions:\n"
    "- For each item in the list of subjects, actions, temporal markers or degree descriptions, "
    "extract raw, verbatim content from the text that is directly relevant to the query.\n"
    "- Format each extracted piece as:\n"
    "  subjects: [exact content from the text about the subjects]\n"
    "  actions: [exact content from the text describing an action involving the verb]\n"
    "  temporal markers: [exact content from the text indicating when an event occurred or the "
    "time duration]\n"
    "  degree modifiers: [exact content from the text indicating the characteristics of the "
    "actions and subjects.]\n"
    "- Do not paraphrase, summarize, or use your own words. Use only direct excerpts or minimally "
    "truncated phrases that preserve original wording.\n"
    "- Each subjects/actions/temporal markers/degree modifiers-content pair must appear on a "
    "separate line.\n"
    "- Only include content that provides diverse and query-relevant information.\n"
    "- If no relevant content exists in the text for a given entity, verb, or time expression "
    "with respect to the query, omit it entirely.\n";

const char* kAnswerInstruction =
    "Answer the question based on the given system memory of reasoning. Just give the answer and "
    "do not output other information.\n"
    "You should provide your final answer in the format \\boxed{{YOUR_ANSWER}}.\n"
    "\n"
    "If the answer is in the context, maintain the illustrations (e.g., examples and specific "
    "phrasings) present in the context when formulating the answer.\n"
    "\n"
    "System memory: {SYSTEM_MEMORY}\n"
    "Question: {QUESTION}\n"
    "\n"
    "Generate an accurate answer based solely on the provided information.\n";

const char* kMcInstruction =
    "Please read the provided contexts and answer the question below.\n"
    "<text> {CONTEXTS} </text>\n"
    "What is the correct answer to this question: {QUERY}\n"
    "Choices:\n"
    "(A) {CHOICE_A}\n"
    "(B) {CHOICE_B}\n"
    "(C) {CHOICE_C}\n"
    "(D) {CHOICE_D}\n"
    "Answer the question based on the given context. Just give the answer and do not output "
    "other information. Format your response as follows: \"The correct answer is (insert answer "
    "here)\".\n";

std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

PromptBundle default_prompts() {
    return {kReasoningInstruction, kGrowthInstruction, kAnswerInstruction, kMcInstruction};
}

std::string to_string(FinishKind kind) {
    switch (kind) {
        case FinishKind::Stop: return "stop";
        case FinishKind::Length: return "length";
        case FinishKind::Marker: return "marker";
    }
    return "stop";
}

std::string render(const std::string& tmpl, const std::map<std::string, std::string>& bindings) {
    std::string out;
    out.reserve(tmpl.size());
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        char c = tmpl[i];
        if (c == '{') {
            if (i + 1 < tmpl.size() && tmpl[i + 1] == '{') {
                out += '{';
                ++i;
                continue;
            }
            auto close = tmpl.find('}', i + 1);
            if (close == std::string::npos)
                throw DataError("render: unterminated placeholder at offset " + std::to_string(i));
            std::string name = tmpl.substr(i + 1, close - i - 1);
            auto it = bindings.find(name);
            if (it == bindings.end()) throw DataError("render: unbound placeholder {" + name + "}");
            out += it->second;
            i = close;
        } else if (c == '}') {
            if (i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
                out += '}';
                ++i;
                continue;
            }
            throw DataError("render: stray '}' at offset " + std::to_string(i));
        } else {
            out += c;
        }
    }
    return out;
}

MockChatProvider MockChatProvider::from_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read chat scenario: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(std::string("chat scenario parse error: ") + e.what());
    }
    std::vector<Rule> rules;
    const json& list = doc.contains("rules") ? doc["rules"] : doc;
    for (const auto& item : list) {
        Rule rule;
        rule.match = item.at("match").get<std::string>();
        rule.response = item.at("response").get<std::string>();
        rule.once = item.value("once", false);
        rules.push_back(std::move(rule));
    }
    return MockChatProvider(std::move(rules));
}

void MockChatProvider::add_rule(std::string match, std::string response, bool once) {
    rules_.push_back({std::move(match), std::move(response), once, false});
}

RawCompletion MockChatProvider::complete_raw(const std::vector<ChatMessage>& messages,
                                             const std::vector<std::string>&) {
    std::string last_user;
    for (const auto& msg : messages)
        if (msg.role == "user") last_user = msg.content;
    std::lock_guard lock(mutex_);
    for (auto& rule : rules_) {
        if (rule.used) continue;
        if (last_user.find(rule.match) == std::string::npos) continue;
        if (rule.once) rule.used = true;
        return {rule.response, -1, -1, 1};
    }
    throw DataError("mock chat provider: no rule matches last user message");
}

HttpChatProvider::HttpChatProvider(std::string url, std::string model, std::string api_key,
                                   double temperature, int max_attempts)
    : url_(std::move(url)), model_(std::move(model)), api_key_(std::move(api_key)),
      temperature_(temperature), max_attempts_(max_attempts) {}

RawCompletion HttpChatProvider::complete_raw(const std::vector<ChatMessage>& messages,
                                             const std::vector<std::string>& stop) {
    auto [host, path] = split_url(url_);
    json body;
    body["model"] = model_;
    body["messages"] = json::array();
    for (const auto& msg : messages)
        body["messages"].push_back({{"role", msg.role}, {"content", msg.content}});
    body["temperature"] = temperature_;
    if (!stop.empty()) body["stop"] = stop;
    std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 1; attempt <= max_attempts_; ++attempt) {
        httplib::Client client(host);
        client.set_read_timeout(300, 0);
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
            throw TransportError("chat provider returned HTTP " + std::to_string(res->status),
                                 attempt);
        json doc;
        try {
            doc = json::parse(res->body);
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed chat response: ") + e.what());
        }
        RawCompletion out;
        out.attempts = attempt;
        try {
            const json& choice = doc.at("choices").at(0);
            if (choice.contains("message"))
                out.text = choice["message"].at("content").get<std::string>();
            else
                out.text = choice.at("text").get<std::string>();
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed chat response: ") + e.what());
        }
        if (doc.contains("usage")) {
            out.prompt_tokens = doc["usage"].value("prompt_tokens", -1);
            out.completion_tokens = doc["usage"].value("completion_tokens", -1);
        }
        return out;
    }
    throw TransportError("chat provider unreachable after " + std::to_string(max_attempts_) +
                             " attempts: " + last_error,
                         max_attempts_);
}

ChatExchange complete(const std::vector<ChatMessage>& messages, ChatProvider& provider,
                      const std::vector<std::string>& stop_markers) {
    if (messages.empty()) throw DomainError("complete: no messages");
    RawCompletion raw = provider.complete_raw(messages, stop_markers);

    ChatExchange exchange;
    exchange.messages = messages;
    exchange.attempts = raw.attempts;
    exchange.completion = raw.text;
    exchange.finish_kind = FinishKind::Stop;

    std::size_t cut = std::string::npos;
    std::size_t cut_end = 0;
    for (const auto& marker : stop_markers) {
        auto pos = raw.text.find(marker);
        if (pos != std::string::npos && pos < cut) {
            cut = pos;
            cut_end = pos + marker.size();
        }
    }
    if (cut != std::string::npos) {
        exchange.completion = raw.text.substr(0, cut_end);  // marker retained
        exchange.finish_kind = FinishKind::Marker;
    }

    exchange.prompt_tokens = raw.prompt_tokens;
    exchange.completion_tokens = raw.completion_tokens;
    if (exchange.prompt_tokens < 0) {
        long n = 0;
        for (const auto& msg : messages) n += static_cast<long>(count_tokens(msg.content));
        exchange.prompt_tokens = n;
    }
    if (exchange.completion_tokens < 0)
        exchange.completion_tokens = static_cast<long>(count_tokens(exchange.completion));
    return exchange;
}

}  // namespace memgrow
