#include "memgrow/grower.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "memgrow/errors.hpp"

namespace memgrow {
namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// Prompt-facing spelling ("temporal markers") of each category.
std::string category_label(SeedCategory category) {
    std::string label = to_string(category);
    std::replace(label.begin(), label.end(), '_', ' ');
    return label;
}

std::optional<std::pair<SeedCategory, std::string>> match_line(const std::string& raw) {
    std::string line = trim(raw);
    if (!line.empty() && (line[0] == '-' || line[0] == '*')) line = trim(line.substr(1));
    std::string low = lower(line);
    for (SeedCategory category : kSeedCategories) {
        for (std::string prefix : {category_label(category), to_string(category)}) {
            prefix += ':';
            if (low.rfind(prefix, 0) != 0) continue;
            std::string payload = trim(line.substr(prefix.size()));
            auto open = payload.find('[');
            auto close = payload.rfind(']');
            if (open != std::string::npos && close != std::string::npos && close > open)
                payload = trim(payload.substr(open + 1, close - open - 1));
            if (payload.empty()) return std::nullopt;
            return std::make_pair(category, payload);
        }
    }
    return std::nullopt;
}

}  // namespace

std::vector<std::pair<SeedCategory, std::string>> parse_fragments(const std::string& completion) {
    std::vector<std::pair<SeedCategory, std::string>> out;
    std::istringstream in(completion);
    std::string line;
    while (std::getline(in, line)) {
        if (auto matched = match_line(line)) out.push_back(std::move(*matched));
    }
    return out;
}

std::string build_growth_prompt(const GrowthRequest& request, const std::string& instruction) {
    std::string seed_list;
    if (request.seeds.empty()) {
        // Seedless fallback: no category survived tagging, grow anything useful.
        seed_list = "any query-relevant content";
    } else {
        for (SeedCategory category : kSeedCategories) {
            auto it = request.seeds.seeds.find(category);
            if (it == request.seeds.seeds.end() || it->second.empty()) continue;
            std::string line = category_label(category) + ": ";
            for (std::size_t i = 0; i < it->second.size(); ++i) {
                if (i > 0) line += ", ";
                line += it->second[i];
            }
            if (!seed_list.empty()) seed_list += "\n";
            seed_list += line;
        }
    }
    std::string text;
    for (const auto& doc : request.documents) {
        if (!text.empty()) text += "\n\n";
        text += doc;
    }
    return render(instruction,
                  {{"SEED_LIST", seed_list}, {"TEXT", text}, {"QUERY", request.query}});
}

GrowthResult grow(const GrowthRequest& request, ChatProvider& gateway, Embedder& embedder,
                  const std::string& instruction, FragmentIdGen& ids) {
    if (request.documents.empty()) throw DomainError("grow: no documents");
    GrowthResult result;
    std::string prompt = build_growth_prompt(request, instruction);
    ChatExchange exchange = complete({{"user", prompt}}, gateway, {});
    result.prompt_tokens = exchange.prompt_tokens;
    result.completion_tokens = exchange.completion_tokens;

    auto parsed = parse_fragments(exchange.completion);
    if (parsed.empty()) {
        result.warnings.push_back("round " + std::to_string(request.round) +
                                  ": growth completion yielded no fragments");
        return result;
    }
    EmbeddingVector query_embedding = embedder.embed(request.query);
    for (auto& [category, text] : parsed) {
        MemoryFragment fragment;
        fragment.fragment_id = ids.next();
        fragment.text = text;
        fragment.category = request.seeds.empty() ? SeedCategory::Subjects : category;
        fragment.round = request.round;
        fragment.source_query = request.query;
        fragment.embedding = embedder.embed(text);
        fragment.own_query_relevance = cosine(fragment.embedding, query_embedding);
        result.fragments.push_back(std::move(fragment));
    }
    return result;
}

}  // namespace memgrow
