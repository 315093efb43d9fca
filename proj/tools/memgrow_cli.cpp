#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "memgrow/agent.hpp"
#include "memgrow/corpus.hpp"
#include "memgrow/embedding.hpp"
#include "memgrow/errors.hpp"
#include "memgrow/eval.hpp"
#include "memgrow/seeds.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct RunConfig {
    int n_max = 5;
    std::size_t top_k = 3;
    std::size_t chunk_tokens = 256;
    double tau_s = 0.3;
    double tau_r = 0.3;
    double alpha = 0.6;
    double beta = 0.4;
    double lambda = 1.0;
    std::size_t k_max = 10;
    std::string mode = "full";
    int parallelism = 1;
    bool skip_errors = false;

    std::string llm_url, llm_model, llm_scenario;
    std::string embed_url, embed_model, embed_scenario;
    std::size_t embed_dim = 0;

    std::string corpus_path = "corpus.jsonl";
    std::string cache_path;
    std::string output_dir = ".";
};

// Config-file values fill in only the flags the command line left untouched.
void apply_config_file(const std::string& path, CLI::App& app, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw memgrow::ConfigError("cannot read config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw memgrow::DataError(std::string("config file parse error: ") + e.what());
    }
    auto set_if_unset = [&](const char* flag, auto& target) {
        CLI::Option* opt = app.get_option_no_throw(flag);
        if (opt && opt->count() > 0) return;  // CLI wins
        std::string key = flag + 2;           // strip leading "--"
        std::replace(key.begin(), key.end(), '-', '_');
        if (doc.contains(key)) target = doc[key].get<std::decay_t<decltype(target)>>();
    };
    set_if_unset("--n-max", cfg.n_max);
    set_if_unset("--top-k", cfg.top_k);
    set_if_unset("--chunk-tokens", cfg.chunk_tokens);
    set_if_unset("--tau-s", cfg.tau_s);
    set_if_unset("--tau-r", cfg.tau_r);
    set_if_unset("--alpha", cfg.alpha);
    set_if_unset("--beta", cfg.beta);
    set_if_unset("--lambda", cfg.lambda);
    set_if_unset("--k-max", cfg.k_max);
    set_if_unset("--mode", cfg.mode);
    set_if_unset("--parallelism", cfg.parallelism);
    set_if_unset("--llm-url", cfg.llm_url);
    set_if_unset("--llm-model", cfg.llm_model);
    set_if_unset("--llm-scenario", cfg.llm_scenario);
    set_if_unset("--embed-url", cfg.embed_url);
    set_if_unset("--embed-model", cfg.embed_model);
    set_if_unset("--embed-scenario", cfg.embed_scenario);
    set_if_unset("--embed-dim", cfg.embed_dim);
    set_if_unset("--corpus", cfg.corpus_path);
    set_if_unset("--cache", cfg.cache_path);
    set_if_unset("--output-dir", cfg.output_dir);
}

std::string env_or_empty(const char* name) {
    const char* v = std::getenv(name);
    return v ? v : "";
}

std::shared_ptr<memgrow::EmbeddingProvider> make_embed_provider(const RunConfig& cfg) {
    if (!cfg.embed_scenario.empty())
        return std::make_shared<memgrow::MockEmbeddingProvider>(
            memgrow::MockEmbeddingProvider::from_scenario_file(cfg.embed_scenario));
    if (cfg.embed_dim > 0)
        return std::make_shared<memgrow::MockEmbeddingProvider>(cfg.embed_dim);
    if (!cfg.embed_url.empty())
        return std::make_shared<memgrow::HttpEmbeddingProvider>(
            cfg.embed_url, cfg.embed_model, env_or_empty("MEMGROW_EMBED_KEY"));
    throw memgrow::ConfigError(
        "no embedding provider configured (--embed-url, --embed-scenario, or --embed-dim)");
}

std::unique_ptr<memgrow::ChatProvider> make_chat_provider(const RunConfig& cfg) {
    if (!cfg.llm_scenario.empty())
        return std::make_unique<memgrow::MockChatProvider>(
            memgrow::MockChatProvider::from_scenario_file(cfg.llm_scenario));
    if (!cfg.llm_url.empty())
        return std::make_unique<memgrow::HttpChatProvider>(cfg.llm_url, cfg.llm_model,
                                                           env_or_empty("MEMGROW_LLM_KEY"));
    throw memgrow::ConfigError("no chat provider configured (--llm-url or --llm-scenario)");
}

memgrow::AgentConfig make_agent_config(const RunConfig& cfg) {
    memgrow::AgentConfig config;
    config.n_max = cfg.n_max;
    config.top_k = cfg.top_k;
    config.mode = memgrow::agent_mode_from_string(cfg.mode);
    config.scoring = {cfg.alpha, cfg.beta, cfg.tau_s, cfg.tau_r, cfg.lambda, cfg.k_max};
    config.prompts = memgrow::default_prompts();
    return config;
}

std::string default_cache_path(const RunConfig& cfg) {
    return cfg.cache_path.empty() ? cfg.corpus_path + ".embcache" : cfg.cache_path;
}

std::vector<memgrow::Document> read_input_documents(const std::string& input_path) {
    std::ifstream in(input_path);
    if (!in) throw memgrow::DataError("cannot read input: " + input_path);
    std::vector<memgrow::Document> docs;
    if (input_path.size() > 6 && input_path.substr(input_path.size() - 6) == ".jsonl") {
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            json rec;
            try {
                rec = json::parse(line);
            } catch (const json::exception& e) {
                throw memgrow::DataError("input parse error at line " + std::to_string(lineno) +
                                         ": " + e.what());
            }
            docs.push_back({rec.at("doc_id").get<std::string>(),
                            rec.at("text").get<std::string>(), rec.value("source_tag", "")});
        }
    } else {
        // Plain text: blank-line separated paragraphs become documents.
        std::stringstream buffer;
        buffer << in.rdbuf();
        std::string text = buffer.str();
        std::string paragraph;
        std::istringstream lines(text);
        std::string line;
        int count = 0;
        auto flush = [&] {
            if (paragraph.find_first_not_of(" \t\r\n") == std::string::npos) {
                paragraph.clear();
                return;
            }
            char id[16];
            std::snprintf(id, sizeof(id), "doc-%04d", ++count);
            docs.push_back({id, paragraph, ""});
            paragraph.clear();
        };
        while (std::getline(lines, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) {
                flush();
            } else {
                if (!paragraph.empty()) paragraph += "\n";
                paragraph += line;
            }
        }
        flush();
    }
    return docs;
}

int cmd_ingest(const RunConfig& cfg, const std::string& input_path) {
    auto docs = read_input_documents(input_path);
    memgrow::ChunkCollection corpus = memgrow::ingest(docs, cfg.chunk_tokens);
    memgrow::save_corpus(corpus, cfg.corpus_path);

    memgrow::Embedder embedder(make_embed_provider(cfg), default_cache_path(cfg));
    for (const auto& chunk : corpus.chunks) embedder.embed(chunk.text);
    embedder.save_cache();

    std::size_t total_tokens = 0;
    for (const auto& chunk : corpus.chunks) total_tokens += chunk.tokens;
    std::cout << "ingested " << docs.size() << " documents, " << corpus.chunks.size()
              << " chunks, " << total_tokens << " tokens (chunk_size=" << cfg.chunk_tokens
              << ")\n"
              << "embeddings: " << embedder.provider_calls() << " computed, "
              << embedder.cache_hits() << " cache hits\n"
              << "corpus: " << cfg.corpus_path << "\ncache: " << default_cache_path(cfg) << "\n";
    return 0;
}

int cmd_ask(const RunConfig& cfg, const std::string& question) {
    memgrow::ChunkCollection corpus = memgrow::load_corpus(cfg.corpus_path);
    memgrow::Embedder embedder(make_embed_provider(cfg), default_cache_path(cfg));
    memgrow::EmbeddedIndex index = memgrow::build_index(std::move(corpus), embedder);

    auto gateway = make_chat_provider(cfg);
    memgrow::RuleTagger tagger;
    memgrow::AgentConfig config = make_agent_config(cfg);
    memgrow::AgentServices services{&index, &embedder, &tagger, gateway.get()};
    memgrow::Session session = memgrow::run(question, config, services);

    fs::create_directories(cfg.output_dir);
    std::string dump_path = (fs::path(cfg.output_dir) / "session.json").string();
    std::ofstream out(dump_path, std::ios::binary);
    out << memgrow::session_to_json(session, config);
    embedder.save_cache();

    if (!session.error.empty()) {
        std::cerr << "transport error: " << session.error << "\npartial session: " << dump_path
                  << "\n";
        return 3;
    }
    std::cout << session.answer << "\n";
    std::cerr << "session: " << dump_path << "\n";
    return 0;
}

int cmd_eval(const RunConfig& cfg, const std::string& dataset_path,
             const std::string& format_tag) {
    auto dataset = memgrow::load_dataset(dataset_path, format_tag);
    auto gateway = make_chat_provider(cfg);
    memgrow::Embedder embedder(make_embed_provider(cfg), cfg.cache_path);
    memgrow::RuleTagger tagger;
    memgrow::AgentConfig config = make_agent_config(cfg);
    memgrow::EvalOptions options{cfg.parallelism, cfg.skip_errors, cfg.chunk_tokens};
    memgrow::EvalReport report =
        memgrow::run_eval(dataset, config, *gateway, embedder, tagger, options);

    fs::create_directories(cfg.output_dir);
    {
        std::ofstream out(fs::path(cfg.output_dir) / "report.json", std::ios::binary);
        out << memgrow::report_to_json(report, config, options);
    }
    {
        std::ofstream out(fs::path(cfg.output_dir) / "report.txt", std::ios::binary);
        out << memgrow::report_to_table(report);
    }
    std::cout << "qa_f1=" << report.mean_qa_f1 << " em=" << report.mean_exact_match
              << " rouge_l=" << report.mean_rouge_l << " evaluated=" << report.evaluated
              << " failed=" << report.failed << "\n";
    return 0;
}

int cmd_path_debug(const std::string& session_path) {
    std::ifstream in(session_path, std::ios::binary);
    if (!in) throw memgrow::DataError("cannot read session dump: " + session_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    memgrow::Session session = memgrow::session_from_json(buffer.str());
    std::cout << memgrow::path_debug_json(session.consolidated(), session.scores, session.region,
                                          session.path, session.greedy_trace)
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"memgrow: agentic deep search with seed-grown memory and path retracing"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_file, input_path, question, dataset_path, session_path;
    std::string format_tag = "jsonl";

    app.add_option("--config", config_file, "JSON config file (flat RunConfig keys)");
    app.add_option("--n-max", cfg.n_max, "maximum search rounds");
    app.add_option("--top-k", cfg.top_k, "retrieved chunks per round");
    app.add_option("--chunk-tokens", cfg.chunk_tokens, "tokens per corpus chunk");
    app.add_option("--tau-s", cfg.tau_s, "bridge-weight threshold");
    app.add_option("--tau-r", cfg.tau_r, "region contribution threshold");
    app.add_option("--alpha", cfg.alpha, "relevance contribution weight");
    app.add_option("--beta", cfg.beta, "bridge potential weight");
    app.add_option("--lambda", cfg.lambda, "path smoothness penalty rate");
    app.add_option("--k-max", cfg.k_max, "maximum path length");
    app.add_option("--mode", cfg.mode, "full|no_retrace|no_memory");
    app.add_option("--parallelism", cfg.parallelism, "eval worker count");
    app.add_flag("--skip-errors", cfg.skip_errors, "exclude failed examples from means");
    app.add_option("--llm-url", cfg.llm_url, "chat completions endpoint");
    app.add_option("--llm-model", cfg.llm_model, "chat model name");
    app.add_option("--llm-scenario", cfg.llm_scenario, "scripted mock chat scenario file");
    app.add_option("--embed-url", cfg.embed_url, "embeddings endpoint");
    app.add_option("--embed-model", cfg.embed_model, "embedding model name");
    app.add_option("--embed-scenario", cfg.embed_scenario, "mock embedding scenario file");
    app.add_option("--embed-dim", cfg.embed_dim, "hash-seeded mock embedder dimension");
    app.add_option("--corpus", cfg.corpus_path, "corpus file path");
    app.add_option("--cache", cfg.cache_path, "embedding cache path");
    app.add_option("--output-dir", cfg.output_dir, "output directory");

    CLI::App* ingest = app.add_subcommand("ingest", "split documents into an embedded corpus");
    ingest->add_option("input", input_path, "input .txt (blank-line paragraphs) or .jsonl")
        ->required();

    CLI::App* ask = app.add_subcommand("ask", "answer one question against the corpus");
    ask->add_option("question", question, "the question")->required();

    CLI::App* eval = app.add_subcommand("eval", "batch-evaluate a QA dataset");
    eval->add_option("dataset", dataset_path, "dataset JSONL path")->required();
    eval->add_option("--format", format_tag, "dataset format tag (jsonl|longbench)");

    CLI::App* path_debug =
        app.add_subcommand("path-debug", "emit the path debug JSON from a session dump");
    path_debug->add_option("session", session_path, "session dump JSON path")->required();

    try {
        app.parse(argc, argv);
        if (!config_file.empty()) apply_config_file(config_file, app, cfg);
        if (ingest->parsed()) return cmd_ingest(cfg, input_path);
        if (ask->parsed()) return cmd_ask(cfg, question);
        if (eval->parsed()) return cmd_eval(cfg, dataset_path, format_tag);
        if (path_debug->parsed()) return cmd_path_debug(session_path);
        return 2;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const memgrow::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const memgrow::TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
