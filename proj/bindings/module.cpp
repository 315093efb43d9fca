#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "memgrow/agent.hpp"
#include "memgrow/corpus.hpp"
#include "memgrow/embedding.hpp"
#include "memgrow/engine.hpp"
#include "memgrow/eval.hpp"
#include "memgrow/grower.hpp"
#include "memgrow/llm.hpp"
#include "memgrow/seeds.hpp"

namespace py = pybind11;
using namespace memgrow;

namespace {

EmbeddingVector make_vector(std::vector<double> values, bool normalized) {
    return {std::move(values), normalized};
}

std::vector<ContributionScore> score_py(
    const std::vector<std::tuple<std::string, int, double, std::vector<double>>>& fragments,
    const std::vector<double>& query_embedding, const ScoringConfig& config) {
    std::vector<MemoryFragment> frags;
    for (const auto& [id, round, relevance, embedding] : fragments) {
        MemoryFragment f;
        f.fragment_id = id;
        f.round = round;
        f.own_query_relevance = relevance;
        f.embedding = normalize({embedding, false});
        f.text = id;
        frags.push_back(std::move(f));
    }
    return score(frags, normalize({query_embedding, false}), config);
}

}  // namespace

PYBIND11_MODULE(_memgrow, m) {
    m.doc() = "memgrow core bindings";

    // corpus
    py::class_<Chunk>(m, "Chunk")
        .def_readonly("chunk_id", &Chunk::chunk_id)
        .def_readonly("doc_id", &Chunk::doc_id)
        .def_readonly("ordinal", &Chunk::ordinal)
        .def_readonly("tokens", &Chunk::tokens)
        .def_readonly("text", &Chunk::text);
    m.def("tokenize", &tokenize, py::arg("text"));
    m.def("join_tokens", &join_tokens, py::arg("tokens"));
    m.def(
        "ingest",
        [](const std::vector<std::pair<std::string, std::string>>& documents,
           std::size_t chunk_size) {
            std::vector<Document> docs;
            for (const auto& [id, text] : documents) docs.push_back({id, text, ""});
            return ingest(docs, chunk_size).chunks;
        },
        py::arg("documents"), py::arg("chunk_size"));

    // embeddings
    m.def(
        "cosine",
        [](const std::vector<double>& u, const std::vector<double>& v) {
            return cosine({u, false}, {v, false});
        },
        py::arg("u"), py::arg("v"));

    // seeds
    m.def("tag_query", [](const std::string& query) {
        RuleTagger tagger;
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& token : tag_query(query, tagger))
            out.emplace_back(token.surface, to_string(token.pos));
        return out;
    });
    m.def("build_seeds", [](const std::string& query) {
        RuleTagger tagger;
        SeedSet seeds = build_seeds(tag_query(query, tagger));
        std::map<std::string, std::vector<std::string>> out;
        for (const auto& [category, tokens] : seeds.seeds)
            if (!tokens.empty()) out[to_string(category)] = tokens;
        return out;
    });

    // prompts and protocol
    m.def("render", &render, py::arg("template"), py::arg("bindings"));
    m.def("extract_marked_query", &extract_marked_query, py::arg("reasoning"));
    m.def(
        "extract_answer",
        [](const std::string& completion, bool multiple_choice) {
            ExtractedAnswer a = extract_answer(completion, multiple_choice);
            return std::make_pair(a.text, a.warning);
        },
        py::arg("completion"), py::arg("multiple_choice") = false);
    m.def("parse_fragments", [](const std::string& completion) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [category, text] : parse_fragments(completion))
            out.emplace_back(to_string(category), text);
        return out;
    });

    // scoring and path retracing
    py::class_<ScoringConfig>(m, "ScoringConfig")
        .def(py::init([](double alpha, double beta, double tau_s, double tau_r, double lambda,
                         std::size_t k_max) {
                 return ScoringConfig{alpha, beta, tau_s, tau_r, lambda, k_max};
             }),
             py::arg("alpha") = 0.6, py::arg("beta") = 0.4, py::arg("tau_s") = 0.3,
             py::arg("tau_r") = 0.3, py::arg("lambda_") = 1.0, py::arg("k_max") = 10)
        .def_readwrite("alpha", &ScoringConfig::alpha)
        .def_readwrite("beta", &ScoringConfig::beta)
        .def_readwrite("tau_s", &ScoringConfig::tau_s)
        .def_readwrite("tau_r", &ScoringConfig::tau_r)
        .def_readwrite("lambda_", &ScoringConfig::lambda)
        .def_readwrite("k_max", &ScoringConfig::k_max);
    py::class_<ContributionScore>(m, "ContributionScore")
        .def_readonly("fragment_id", &ContributionScore::fragment_id)
        .def_readonly("c_rel", &ContributionScore::c_rel)
        .def_readonly("c_bp", &ContributionScore::c_bp)
        .def_readonly("c", &ContributionScore::c)
        .def_readonly("bp_weight", &ContributionScore::bp_weight);
    py::class_<PathStep>(m, "PathStep")
        .def_readonly("fragment_id", &PathStep::fragment_id)
        .def_readonly("c", &PathStep::c)
        .def_readonly("mu", &PathStep::mu);
    py::class_<MemoryPath>(m, "MemoryPath")
        .def_readonly("steps", &MemoryPath::steps)
        .def_readonly("objective", &MemoryPath::objective);
    m.def("score", &score_py, py::arg("fragments"), py::arg("query_embedding"),
          py::arg("config"),
          "fragments: list of (fragment_id, round, own_query_relevance, embedding)");
    m.def(
        "build_path",
        [](const std::vector<std::tuple<std::string, int, double>>& candidates,
           const std::vector<std::vector<double>>& sim, const ScoringConfig& config) {
            std::vector<PathCandidate> items;
            for (const auto& [id, round, c] : candidates) items.push_back({id, round, c});
            return build_path_scored(
                items, [&sim](std::size_t a, std::size_t b) { return sim[a][b]; }, config);
        },
        py::arg("candidates"), py::arg("similarity"), py::arg("config"),
        "candidates: list of (fragment_id, round, c); similarity: full matrix");
    m.def(
        "oracle_best_path",
        [](const std::vector<std::tuple<std::string, int, double>>& candidates,
           const std::vector<std::vector<double>>& sim, const ScoringConfig& config) {
            std::vector<PathCandidate> items;
            for (const auto& [id, round, c] : candidates) items.push_back({id, round, c});
            return oracle_best_path_scored(
                items, [&sim](std::size_t a, std::size_t b) { return sim[a][b]; }, config);
        },
        py::arg("candidates"), py::arg("similarity"), py::arg("config"));

    // metrics
    m.def(
        "qa_f1",
        [](const std::string& pred, const std::vector<std::string>& golds,
           const std::string& lang) {
            return qa_f1(pred, golds, lang == "zh" ? Language::Zh : Language::En);
        },
        py::arg("prediction"), py::arg("golds"), py::arg("language") = "en");
    m.def(
        "exact_match",
        [](const std::string& pred, const std::vector<std::string>& golds,
           const std::string& lang) {
            return exact_match(pred, golds, lang == "zh" ? Language::Zh : Language::En);
        },
        py::arg("prediction"), py::arg("golds"), py::arg("language") = "en");
    m.def(
        "rouge_l",
        [](const std::string& pred, const std::vector<std::string>& golds,
           const std::string& lang) {
            return rouge_l(pred, golds, lang == "zh" ? Language::Zh : Language::En);
        },
        py::arg("prediction"), py::arg("golds"), py::arg("language") = "en");
}
