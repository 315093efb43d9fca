#pragma once

#include <string>
#include <vector>

#include "memgrow/agent.hpp"

namespace memgrow {

enum class Language { En, Zh };
enum class TaskKind { Qa, MultipleChoice };

struct QAExample {
    std::string example_id;
    std::string question;
    std::vector<std::string> gold_answers;
    std::string context;
    Language language{Language::En};
    TaskKind task_kind{TaskKind::Qa};
    std::vector<std::string> choices;  // A..D when multiple choice
};

std::vector<QAExample> load_dataset(const std::string& path, const std::string& format_tag);

// SQuAD-style normalization: lowercase, punctuation strip, article removal
// for English; per-character tokens for Chinese.
std::vector<std::string> normalize_tokens(const std::string& text, Language language);

double qa_f1(const std::string& prediction, const std::vector<std::string>& golds,
             Language language);
int exact_match(const std::string& prediction, const std::vector<std::string>& golds,
                Language language);
double rouge_l(const std::string& prediction, const std::vector<std::string>& golds,
               Language language);

struct EvalOptions {
    int parallelism{1};
    bool skip_errors{false};
    std::size_t chunk_size{256};
};

struct ExampleResult {
    std::string example_id;
    double qa_f1{0.0};      // percentages, 0..100
    double exact_match{0.0};
    double rouge_l{0.0};
    long prompt_tokens{0};
    long completion_tokens{0};
    std::string answer;
    std::string error;
};

struct EvalReport {
    std::vector<ExampleResult> rows;  // sorted by example_id
    double mean_qa_f1{0.0};
    double mean_exact_match{0.0};
    double mean_rouge_l{0.0};
    double mean_prompt_tokens{0.0};
    double mean_completion_tokens{0.0};
    std::size_t evaluated{0};
    std::size_t failed{0};
};

EvalReport run_eval(const std::vector<QAExample>& dataset, const AgentConfig& config,
                    ChatProvider& gateway, Embedder& embedder, PosTagger& tagger,
                    const EvalOptions& options);

std::string report_to_json(const EvalReport& report, const AgentConfig& config,
                           const EvalOptions& options);
std::string report_to_table(const EvalReport& report);

}  // namespace memgrow
