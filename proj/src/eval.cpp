#include "memgrow/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "memgrow/corpus.hpp"
#include "memgrow/errors.hpp"

namespace memgrow {
namespace {

using json = nlohmann::ordered_json;

bool is_article(const std::string& token) {
    return token == "a" || token == "an" || token == "the";
}

std::map<std::string, int> counts(const std::vector<std::string>& tokens) {
    std::map<std::string, int> out;
    for (const auto& t : tokens) ++out[t];
    return out;
}

double f1_from_overlap(std::size_t overlap, std::size_t pred_len, std::size_t gold_len) {
    if (pred_len == 0 && gold_len == 0) return 1.0;
    if (overlap == 0 || pred_len == 0 || gold_len == 0) return 0.0;
    double precision = static_cast<double>(overlap) / pred_len;
    double recall = static_cast<double>(overlap) / gold_len;
    return 2.0 * precision * recall / (precision + recall);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

Language language_from_string(const std::string& name) {
    if (name == "zh" || name == "ZH" || name == "zh-cn") return Language::Zh;
    return Language::En;
}

}  // namespace

std::vector<std::string> normalize_tokens(const std::string& text, Language language) {
    // Strip ASCII punctuation, lowercase ASCII letters, then segment.
    std::string cleaned;
    cleaned.reserve(text.size());
    for (unsigned char c : text) {
        if (c < 128 && std::ispunct(c)) {
            cleaned += ' ';
        } else if (c < 128) {
            cleaned += static_cast<char>(std::tolower(c));
        } else {
            cleaned += static_cast<char>(c);
        }
    }
    std::vector<std::string> tokens = tokenize(cleaned);
    if (language == Language::En) {
        tokens.erase(std::remove_if(tokens.begin(), tokens.end(), is_article), tokens.end());
    }
    return tokens;
}

double qa_f1(const std::string& prediction, const std::vector<std::string>& golds,
             Language language) {
    auto pred = normalize_tokens(prediction, language);
    auto pred_counts = counts(pred);
    double best = 0.0;
    for (const auto& gold : golds) {
        auto g = normalize_tokens(gold, language);
        auto gold_counts = counts(g);
        std::size_t overlap = 0;
        for (const auto& [token, n] : pred_counts) {
            auto it = gold_counts.find(token);
            if (it != gold_counts.end()) overlap += std::min(n, it->second);
        }
        best = std::max(best, f1_from_overlap(overlap, pred.size(), g.size()));
    }
    return best;
}

int exact_match(const std::string& prediction, const std::vector<std::string>& golds,
                Language language) {
    auto pred = normalize_tokens(prediction, language);
    for (const auto& gold : golds)
        if (pred == normalize_tokens(gold, language)) return 1;
    return 0;
}

double rouge_l(const std::string& prediction, const std::vector<std::string>& golds,
               Language language) {
    auto pred = normalize_tokens(prediction, language);
    double best = 0.0;
    for (const auto& gold : golds) {
        auto g = normalize_tokens(gold, language);
        if (pred.empty() && g.empty()) {
            best = 1.0;
            continue;
        }
        std::size_t lcs = lcs_length(pred, g);
        best = std::max(best, f1_from_overlap(lcs, pred.size(), g.size()));
    }
    return best;
}

std::vector<QAExample> load_dataset(const std::string& path, const std::string& format_tag) {
    if (format_tag != "jsonl" && format_tag != "longbench")
        throw ConfigError("unknown dataset format tag: " + format_tag);
    std::ifstream in(path);
    if (!in) throw DataError("cannot read dataset: " + path);
    std::vector<QAExample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("dataset parse error at line " + std::to_string(lineno) + ": " +
                            e.what());
        }
        QAExample example;
        for (const char* field : {"_id", "input", "answers", "context"})
            if (!rec.contains(field))
                throw DataError("dataset record at line " + std::to_string(lineno) +
                                " missing field '" + field + "'");
        example.example_id = rec["_id"].get<std::string>();
        example.question = rec["input"].get<std::string>();
        if (rec["answers"].is_array())
            example.gold_answers = rec["answers"].get<std::vector<std::string>>();
        else
            example.gold_answers = {rec["answers"].get<std::string>()};
        if (example.gold_answers.empty())
            throw DataError("dataset record at line " + std::to_string(lineno) +
                            " has no gold answers");
        example.context = rec["context"].get<std::string>();
        if (example.context.empty())
            throw DataError("dataset record at line " + std::to_string(lineno) +
                            " has empty context");
        example.language = language_from_string(rec.value("language", "en"));
        if (rec.contains("choice_A")) {
            example.task_kind = TaskKind::MultipleChoice;
            for (const char* choice : {"choice_A", "choice_B", "choice_C", "choice_D"})
                example.choices.push_back(rec.value(choice, ""));
        }
        out.push_back(std::move(example));
    }
    return out;
}

EvalReport run_eval(const std::vector<QAExample>& dataset, const AgentConfig& base_config,
                    ChatProvider& gateway, Embedder& embedder, PosTagger& tagger,
                    const EvalOptions& options) {
    EvalReport report;
    report.rows.resize(dataset.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= dataset.size()) return;
            const QAExample& example = dataset[i];
            ExampleResult row;
            row.example_id = example.example_id;
            try {
                // Each example's context is its own retrieval corpus.
                ChunkCollection corpus =
                    ingest({{example.example_id, example.context, ""}}, options.chunk_size);
                EmbeddedIndex index = build_index(std::move(corpus), embedder);

                AgentConfig config = base_config;
                config.multiple_choice = example.task_kind == TaskKind::MultipleChoice;
                config.choices = example.choices;

                AgentServices services{&index, &embedder, &tagger, &gateway};
                Session session = run(example.question, config, services);
                if (!session.error.empty()) throw TransportError(session.error);

                row.answer = session.answer;
                row.prompt_tokens = session.total_prompt_tokens();
                row.completion_tokens = session.total_completion_tokens();
                if (example.task_kind == TaskKind::MultipleChoice) {
                    int hit = exact_match(session.answer, example.gold_answers, example.language);
                    row.exact_match = 100.0 * hit;
                    row.qa_f1 = row.exact_match;
                    row.rouge_l = row.exact_match;
                } else {
                    row.qa_f1 =
                        100.0 * qa_f1(session.answer, example.gold_answers, example.language);
                    row.exact_match = 100.0 * exact_match(session.answer, example.gold_answers,
                                                          example.language);
                    row.rouge_l =
                        100.0 * rouge_l(session.answer, example.gold_answers, example.language);
                }
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            report.rows[i] = std::move(row);
        }
    };

    int workers = std::max(1, options.parallelism);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::sort(report.rows.begin(), report.rows.end(),
              [](const ExampleResult& a, const ExampleResult& b) {
                  return a.example_id < b.example_id;
              });

    double sum_f1 = 0, sum_em = 0, sum_rl = 0, sum_pt = 0, sum_ct = 0;
    std::size_t counted = 0;
    for (const auto& row : report.rows) {
        if (!row.error.empty()) {
            ++report.failed;
            if (options.skip_errors) continue;  // excluded from means
            // otherwise the failed example scores 0 and is counted
        }
        sum_f1 += row.qa_f1;
        sum_em += row.exact_match;
        sum_rl += row.rouge_l;
        sum_pt += static_cast<double>(row.prompt_tokens);
        sum_ct += static_cast<double>(row.completion_tokens);
        ++counted;
    }
    report.evaluated = counted;
    if (counted > 0) {
        report.mean_qa_f1 = sum_f1 / counted;
        report.mean_exact_match = sum_em / counted;
        report.mean_rouge_l = sum_rl / counted;
        report.mean_prompt_tokens = sum_pt / counted;
        report.mean_completion_tokens = sum_ct / counted;
    }
    return report;
}

std::string report_to_json(const EvalReport& report, const AgentConfig& config,
                           const EvalOptions& options) {
    json doc;
    doc["schema"] = "memgrow-report/1";
    doc["config"] = {{"n_max", config.n_max},
                     {"top_k", config.top_k},
                     {"mode", to_string(config.mode)},
                     {"alpha", config.scoring.alpha},
                     {"beta", config.scoring.beta},
                     {"tau_s", config.scoring.tau_s},
                     {"tau_r", config.scoring.tau_r},
                     {"lambda", config.scoring.lambda},
                     {"k_max", config.scoring.k_max},
                     {"chunk_size", options.chunk_size},
                     {"parallelism", options.parallelism},
                     {"skip_errors", options.skip_errors}};
    doc["aggregate"] = {{"qa_f1", report.mean_qa_f1},
                        {"exact_match", report.mean_exact_match},
                        {"rouge_l", report.mean_rouge_l},
                        {"mean_prompt_tokens", report.mean_prompt_tokens},
                        {"mean_completion_tokens", report.mean_completion_tokens},
                        {"evaluated", report.evaluated},
                        {"failed", report.failed}};
    doc["rows"] = json::array();
    for (const auto& row : report.rows) {
        json r;
        r["example_id"] = row.example_id;
        r["qa_f1"] = row.qa_f1;
        r["exact_match"] = row.exact_match;
        r["rouge_l"] = row.rouge_l;
        r["prompt_tokens"] = row.prompt_tokens;
        r["completion_tokens"] = row.completion_tokens;
        r["answer"] = row.answer;
        r["error"] = row.error;
        doc["rows"].push_back(std::move(r));
    }
    return doc.dump(2);
}

std::string report_to_table(const EvalReport& report) {
    std::ostringstream out;
    out << std::left;
    auto line = [&](const std::string& id, const std::string& f1, const std::string& em,
                    const std::string& rl, const std::string& note) {
        out.width(24);
        out << id;
        out.width(10);
        out << f1;
        out.width(10);
        out << em;
        out.width(10);
        out << rl;
        out << note << "\n";
    };
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", v);
        return std::string(buf);
    };
    line("example_id", "qa_f1", "em", "rouge_l", "");
    for (const auto& row : report.rows)
        line(row.example_id, fmt(row.qa_f1), fmt(row.exact_match), fmt(row.rouge_l),
             row.error.empty() ? "" : "ERROR: " + row.error);
    line("mean", fmt(report.mean_qa_f1), fmt(report.mean_exact_match), fmt(report.mean_rouge_l),
         "");
    return out.str();
}

}  // namespace memgrow
