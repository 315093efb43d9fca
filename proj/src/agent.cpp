#include "memgrow/agent.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

#include "memgrow/errors.hpp"

namespace memgrow {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kSessionSchema = "memgrow-session/1";

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Category-labeled fragment lines, the same shape the LLM produced them in.
std::string fragment_lines(const std::vector<MemoryFragment>& fragments) {
    std::string out;
    for (const auto& fragment : fragments) {
        if (!out.empty()) out += "\n";
        std::string label = to_string(fragment.category);
        std::replace(label.begin(), label.end(), '_', ' ');
        out += label + ": [" + fragment.text + "]";
    }
    return out;
}

std::string splice_block(const std::string& content) {
    return std::string("\n") + kBeginSearchResult + "\n" + content + "\n" + kEndSearchResult +
           "\n";
}

std::vector<ChatMessage> reasoning_messages(const PromptBundle& prompts, int n_max,
                                            const std::string& question,
                                            const std::string& transcript) {
    std::string system = render(prompts.reasoning_instruction,
                                {{"MAX_SEARCH_LIMIT", std::to_string(n_max)}});
    std::string user = "Question: " + question;
    if (!transcript.empty()) user += "\n\n" + transcript;
    return {{"system", system}, {"user", user}};
}

}  // namespace

std::string to_string(AgentMode mode) {
    switch (mode) {
        case AgentMode::Full: return "full";
        case AgentMode::NoRetrace: return "no_retrace";
        case AgentMode::NoMemory: return "no_memory";
    }
    return "full";
}

AgentMode agent_mode_from_string(const std::string& name) {
    if (name == "full") return AgentMode::Full;
    if (name == "no_retrace") return AgentMode::NoRetrace;
    if (name == "no_memory") return AgentMode::NoMemory;
    throw ConfigError("unknown mode: " + name + " (expected full|no_retrace|no_memory)");
}

std::vector<MemoryFragment> Session::consolidated() const {
    std::vector<MemoryFragment> all;
    std::set<std::string> seen;
    for (const auto& round : rounds)
        for (const auto& fragment : round.fragments)
            if (seen.insert(fragment.fragment_id).second) all.push_back(fragment);
    return all;
}

long Session::total_prompt_tokens() const {
    long n = 0;
    for (const auto& e : token_ledger) n += e.prompt_tokens;
    return n;
}

long Session::total_completion_tokens() const {
    long n = 0;
    for (const auto& e : token_ledger) n += e.completion_tokens;
    return n;
}

std::string extract_marked_query(const std::string& reasoning) {
    auto end_pos = reasoning.rfind(kEndSearchQuery);
    if (end_pos == std::string::npos)
        throw ProtocolError("extract_marked_query: end marker missing");
    auto begin_pos = reasoning.rfind(kBeginSearchQuery, end_pos);
    if (begin_pos == std::string::npos)
        throw ProtocolError("extract_marked_query: begin marker missing");
    std::size_t content_start = begin_pos + std::string(kBeginSearchQuery).size();
    std::string query = trim(reasoning.substr(content_start, end_pos - content_start));
    if (query.empty()) throw ProtocolError("extract_marked_query: empty query between markers");
    return query;
}

ExtractedAnswer extract_answer(const std::string& completion, bool multiple_choice) {
    if (multiple_choice) {
        const std::string needle = "The correct answer is";
        auto pos = completion.rfind(needle);
        if (pos != std::string::npos) {
            std::size_t i = pos + needle.size();
            while (i < completion.size() &&
                   (completion[i] == ' ' || completion[i] == ':' || completion[i] == '('))
                ++i;
            if (i < completion.size() && completion[i] >= 'A' && completion[i] <= 'D')
                return {std::string(1, completion[i]), false};
        }
        return {trim(completion), true};
    }

    const std::string needle = "\\boxed{";
    auto pos = completion.rfind(needle);
    if (pos != std::string::npos) {
        std::size_t i = pos + needle.size();
        int depth = 1;
        std::string content;
        for (; i < completion.size(); ++i) {
            char c = completion[i];
            if (c == '{') ++depth;
            else if (c == '}') {
                if (--depth == 0) return {trim(content), false};
            }
            content += c;
        }
        // unbalanced box falls through to the fallback
    }
    return {trim(completion), true};
}

Session run(const std::string& question, const AgentConfig& config,
            const AgentServices& services) {
    if (config.n_max < 1) throw ConfigError("n_max must be >= 1");
    if (config.top_k < 1) throw ConfigError("top_k must be >= 1");
    config.scoring.validate();

    Session session;
    session.original_query = question;
    session.mode = config.mode;
    FragmentIdGen ids;

    try {
        int n = 1;
        bool searching = true;
        while (n <= config.n_max && searching) {
            auto messages =
                reasoning_messages(config.prompts, config.n_max, question, session.transcript);
            ChatExchange exchange = complete(messages, *services.gateway, {kEndSearchQuery});
            session.token_ledger.push_back({"reason#" + std::to_string(n),
                                            exchange.prompt_tokens, exchange.completion_tokens});
            session.transcript += exchange.completion;

            if (exchange.finish_kind != FinishKind::Marker ||
                !ends_with(exchange.completion, kEndSearchQuery)) {
                searching = false;  // natural stop: retrieved information is sufficient
                break;
            }

            RoundRecord round;
            round.round = n;
            round.reasoning = exchange.completion;
            try {
                round.query = extract_marked_query(exchange.completion);
            } catch (const ProtocolError& e) {
                session.warnings.push_back(e.what());
                searching = false;
                break;
            }

            EmbeddingVector query_embedding = services.embedder->embed(round.query);
            round.hits = retrieve(query_embedding, *services.index, config.top_k);

            // Each chunk text goes to growth once per round even when the
            // retriever returns duplicates across rounds.
            std::vector<std::string> documents;
            for (const auto& hit : round.hits) {
                const std::string& text = services.index->chunk_by_id(hit.chunk_id).text;
                if (std::find(documents.begin(), documents.end(), text) == documents.end())
                    documents.push_back(text);
            }

            std::string splice;
            if (config.mode == AgentMode::NoMemory) {
                std::string raw;
                for (const auto& doc : documents) {
                    if (!raw.empty()) raw += "\n\n";
                    raw += doc;
                }
                splice = splice_block(raw);
            } else {
                try {
                    auto tagged = tag_query(round.query, *services.tagger);
                    round.seeds = build_seeds(tagged, n);
                } catch (const std::exception& e) {
                    session.warnings.push_back("round " + std::to_string(n) +
                                               ": tagger failed, growing seedless: " + e.what());
                    round.seeds = SeedSet{};
                    round.seeds.query_round = n;
                }
                GrowthRequest request{round.seeds, documents, round.query, n};
                GrowthResult growth =
                    grow(request, *services.gateway, *services.embedder,
                         config.prompts.growth_instruction, ids);
                session.token_ledger.push_back({"grow#" + std::to_string(n),
                                                growth.prompt_tokens, growth.completion_tokens});
                for (const auto& w : growth.warnings) session.warnings.push_back(w);
                round.fragments = std::move(growth.fragments);
                splice = splice_block(round.fragments.empty()
                                          ? std::string("(no relevant information found)")
                                          : fragment_lines(round.fragments));
            }
            session.transcript += splice;
            session.rounds.push_back(std::move(round));
            ++n;
        }

        // Answer phase: consolidate, retrace, generate from the path only.
        std::string memory_text;
        auto all_fragments = session.consolidated();
        if (config.mode == AgentMode::Full) {
            if (!all_fragments.empty()) {
                EmbeddingVector qo_embedding = services.embedder->embed(question);
                session.scores = score(all_fragments, qo_embedding, config.scoring);
                session.region = filter_region(session.scores, all_fragments, config.scoring);
                session.path = build_path(session.region, session.scores, all_fragments,
                                          config.scoring, &session.greedy_trace);
            } else {
                session.region.threshold = config.scoring.tau_r;
            }
            std::vector<MemoryFragment> path_fragments;
            for (const auto& step : session.path.steps)
                for (const auto& fragment : all_fragments)
                    if (fragment.fragment_id == step.fragment_id) path_fragments.push_back(fragment);
            memory_text = fragment_lines(path_fragments);
        } else if (config.mode == AgentMode::NoRetrace) {
            memory_text = fragment_lines(all_fragments);
        } else {
            memory_text = session.transcript;
        }

        if (config.multiple_choice) {
            std::map<std::string, std::string> bindings = {{"CONTEXTS", memory_text},
                                                           {"QUERY", question}};
            const char* names[] = {"CHOICE_A", "CHOICE_B", "CHOICE_C", "CHOICE_D"};
            for (std::size_t i = 0; i < 4; ++i)
                bindings[names[i]] = i < config.choices.size() ? config.choices[i] : "";
            session.answer_prompt = render(config.prompts.mc_instruction, bindings);
        } else {
            session.answer_prompt = render(config.prompts.answer_instruction,
                                           {{"SYSTEM_MEMORY", memory_text},
                                            {"QUESTION", question}});
        }
        ChatExchange exchange =
            complete({{"user", session.answer_prompt}}, *services.gateway, {});
        session.token_ledger.push_back(
            {"answer", exchange.prompt_tokens, exchange.completion_tokens});
        ExtractedAnswer extracted = extract_answer(exchange.completion, config.multiple_choice);
        session.answer = extracted.text;
        session.answer_warning = extracted.warning;
    } catch (const TransportError& e) {
        session.error = e.what();
    }
    return session;
}

std::string session_to_json(const Session& session, const AgentConfig& config) {
    json doc;
    doc["schema"] = kSessionSchema;
    doc["original_query"] = session.original_query;
    doc["mode"] = to_string(session.mode);
    doc["config"] = {{"n_max", config.n_max},
                     {"top_k", config.top_k},
                     {"alpha", config.scoring.alpha},
                     {"beta", config.scoring.beta},
                     {"tau_s", config.scoring.tau_s},
                     {"tau_r", config.scoring.tau_r},
                     {"lambda", config.scoring.lambda},
                     {"k_max", config.scoring.k_max},
                     {"multiple_choice", config.multiple_choice}};
    doc["rounds"] = json::array();
    for (const auto& round : session.rounds) {
        json r;
        r["round"] = round.round;
        r["reasoning"] = round.reasoning;
        r["query"] = round.query;
        r["hits"] = json::array();
        for (const auto& hit : round.hits)
            r["hits"].push_back({{"chunk_id", hit.chunk_id}, {"score", hit.score}});
        r["seeds"] = json::object();
        for (const auto& [category, tokens] : round.seeds.seeds)
            r["seeds"][to_string(category)] = tokens;
        r["fragments"] = json::array();
        for (const auto& fragment : round.fragments) {
            json f;
            f["fragment_id"] = fragment.fragment_id;
            f["text"] = fragment.text;
            f["category"] = to_string(fragment.category);
            f["round"] = fragment.round;
            f["source_query"] = fragment.source_query;
            f["own_query_relevance"] = fragment.own_query_relevance;
            f["embedding"] = fragment.embedding.values;
            r["fragments"].push_back(std::move(f));
        }
        doc["rounds"].push_back(std::move(r));
    }
    doc["transcript"] = session.transcript;
    doc["scores"] = json::array();
    for (const auto& s : session.scores)
        doc["scores"].push_back({{"fragment_id", s.fragment_id},
                                 {"c_rel", s.c_rel},
                                 {"c_bp", s.c_bp},
                                 {"c", s.c},
                                 {"bp_weight", s.bp_weight}});
    doc["region"] = {{"threshold", session.region.threshold},
                     {"members", session.region.members}};
    doc["path"] = json::array();
    for (const auto& step : session.path.steps)
        doc["path"].push_back(
            {{"fragment_id", step.fragment_id}, {"c", step.c}, {"mu", step.mu}});
    doc["objective"] = session.path.objective;
    doc["greedy_trace"] = json::array();
    for (const auto& step : session.greedy_trace) {
        json rec;
        rec["candidate_scores"] = json::array();
        for (const auto& [id, s] : step.candidate_scores)
            rec["candidate_scores"].push_back({{"fragment_id", id}, {"score", s}});
        rec["chosen"] = step.chosen;
        doc["greedy_trace"].push_back(std::move(rec));
    }
    doc["answer_prompt"] = session.answer_prompt;
    doc["answer"] = session.answer;
    doc["answer_warning"] = session.answer_warning;
    doc["warnings"] = session.warnings;
    doc["error"] = session.error;
    doc["token_ledger"] = json::array();
    for (const auto& e : session.token_ledger)
        doc["token_ledger"].push_back({{"call", e.call},
                                       {"prompt_tokens", e.prompt_tokens},
                                       {"completion_tokens", e.completion_tokens}});
    return doc.dump(2);
}

Session session_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("session parse error: ") + e.what());
    }
    if (!doc.contains("schema") || doc["schema"] != kSessionSchema)
        throw DataError("unsupported session schema version");

    Session session;
    session.original_query = doc.value("original_query", "");
    session.mode = agent_mode_from_string(doc.value("mode", "full"));
    for (const auto& r : doc.value("rounds", json::array())) {
        RoundRecord round;
        round.round = r.value("round", 0);
        round.reasoning = r.value("reasoning", "");
        round.query = r.value("query", "");
        for (const auto& hit : r.value("hits", json::array()))
            round.hits.push_back({hit.at("chunk_id").get<std::string>(),
                                  hit.at("score").get<double>()});
        if (r.contains("seeds"))
            for (auto& [name, tokens] : r["seeds"].items())
                round.seeds.seeds[seed_category_from_string(name)] =
                    tokens.get<std::vector<std::string>>();
        round.seeds.query_round = round.round;
        for (const auto& f : r.value("fragments", json::array())) {
            MemoryFragment fragment;
            fragment.fragment_id = f.at("fragment_id").get<std::string>();
            fragment.text = f.at("text").get<std::string>();
            fragment.category = seed_category_from_string(f.at("category").get<std::string>());
            fragment.round = f.at("round").get<int>();
            fragment.source_query = f.value("source_query", "");
            fragment.own_query_relevance = f.value("own_query_relevance", 0.0);
            fragment.embedding = {f.value("embedding", std::vector<double>{}), true};
            round.fragments.push_back(std::move(fragment));
        }
        session.rounds.push_back(std::move(round));
    }
    session.transcript = doc.value("transcript", "");
    for (const auto& s : doc.value("scores", json::array()))
        session.scores.push_back({s.at("fragment_id").get<std::string>(),
                                  s.at("c_rel").get<double>(), s.at("c_bp").get<double>(),
                                  s.at("c").get<double>(), s.at("bp_weight").get<double>()});
    if (doc.contains("region")) {
        session.region.threshold = doc["region"].value("threshold", 0.0);
        session.region.members =
            doc["region"].value("members", std::vector<std::string>{});
    }
    for (const auto& step : doc.value("path", json::array()))
        session.path.steps.push_back({step.at("fragment_id").get<std::string>(),
                                      step.at("c").get<double>(), step.at("mu").get<double>()});
    session.path.objective = doc.value("objective", 0.0);
    for (const auto& step : doc.value("greedy_trace", json::array())) {
        GreedyTraceStep trace_step;
        for (const auto& cs : step.value("candidate_scores", json::array()))
            trace_step.candidate_scores.emplace_back(cs.at("fragment_id").get<std::string>(),
                                                     cs.at("score").get<double>());
        trace_step.chosen = step.value("chosen", "");
        session.greedy_trace.push_back(std::move(trace_step));
    }
    session.answer_prompt = doc.value("answer_prompt", "");
    session.answer = doc.value("answer", "");
    session.answer_warning = doc.value("answer_warning", false);
    session.warnings = doc.value("warnings", std::vector<std::string>{});
    session.error = doc.value("error", "");
    for (const auto& e : doc.value("token_ledger", json::array()))
        session.token_ledger.push_back({e.at("call").get<std::string>(),
                                        e.at("prompt_tokens").get<long>(),
                                        e.at("completion_tokens").get<long>()});
    return session;
}

}  // namespace memgrow
