#include "memgrow/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "json.hpp"

#include "memgrow/errors.hpp"

namespace memgrow {
namespace {

using json = nlohmann::ordered_json;

constexpr std::size_t kOracleGuard = 8;

// Tie order: lower round first, then fragment_id ascending.
bool tie_before(const PathCandidate& a, const PathCandidate& b) {
    if (a.round != b.round) return a.round < b.round;
    return a.id < b.id;
}

bool sequence_before(const std::vector<PathCandidate>& candidates,
                     const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i] == b[i]) continue;
        return tie_before(candidates[a[i]], candidates[b[i]]);
    }
    return a.size() < b.size();
}

}  // namespace

void ScoringConfig::validate() const {
    if (alpha < 0 || beta < 0 || alpha + beta <= 0)
        throw ConfigError("scoring weights must satisfy alpha >= 0, beta >= 0, alpha + beta > 0");
    if (k_max < 1) throw ConfigError("k_max must be >= 1");
    if (lambda < 0) throw ConfigError("lambda must be >= 0");
}

std::vector<ContributionScore> score(const std::vector<MemoryFragment>& fragments,
                                     const EmbeddingVector& original_query_embedding,
                                     const ScoringConfig& config) {
    config.validate();
    if (fragments.empty()) throw DomainError("score: no fragments");
    for (const auto& fragment : fragments)
        if (fragment.embedding.dim() != original_query_embedding.dim())
            throw DomainError("score: embedding dimension mismatch for " + fragment.fragment_id);

    const std::size_t n = fragments.size();
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i)
        weights[i] = std::max(0.0, fragments[i].own_query_relevance - config.tau_s);

    std::vector<ContributionScore> scores(n);
    for (std::size_t i = 0; i < n; ++i) {
        ContributionScore& s = scores[i];
        s.fragment_id = fragments[i].fragment_id;
        s.bp_weight = weights[i];
        s.c_rel = cosine(fragments[i].embedding, original_query_embedding);
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            num += cosine(fragments[i].embedding, fragments[j].embedding) * weights[j];
            den += weights[j];
        }
        s.c_bp = den > 0.0 ? num / den : 0.0;
        s.c = config.alpha * s.c_rel + config.beta * s.c_bp;
    }
    return scores;
}

MemoryRegion filter_region(const std::vector<ContributionScore>& scores,
                           const std::vector<MemoryFragment>&, const ScoringConfig& config) {
    MemoryRegion region;
    region.threshold = config.tau_r;
    for (const auto& s : scores)
        if (s.c > config.tau_r) region.members.push_back(s.fragment_id);
    return region;
}

MemoryPath build_path_scored(const std::vector<PathCandidate>& candidates, const SimilarityFn& sim,
                             const ScoringConfig& config, std::vector<GreedyTraceStep>* trace) {
    config.validate();
    MemoryPath path;
    std::vector<bool> used(candidates.size(), false);
    std::size_t last = 0;
    while (path.steps.size() < config.k_max) {
        bool first = path.steps.empty();
        std::size_t best = candidates.size();
        double best_score = 0.0;
        double best_mu = 1.0;
        GreedyTraceStep trace_step;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (used[i]) continue;
            double mu = first ? 1.0
                              : std::exp(-config.lambda * (1.0 - sim(i, last)));
            double step_score = candidates[i].c * mu;
            if (trace) trace_step.candidate_scores.emplace_back(candidates[i].id, step_score);
            if (best == candidates.size() || step_score > best_score ||
                (step_score == best_score && tie_before(candidates[i], candidates[best]))) {
                best = i;
                best_score = step_score;
                best_mu = mu;
            }
        }
        if (best == candidates.size()) break;  // region exhausted
        used[best] = true;
        last = best;
        path.steps.push_back({candidates[best].id, candidates[best].c, best_mu});
        path.objective += best_score;
        if (trace) {
            trace_step.chosen = candidates[best].id;
            trace->push_back(std::move(trace_step));
        }
    }
    return path;
}

MemoryPath oracle_best_path_scored(const std::vector<PathCandidate>& candidates,
                                   const SimilarityFn& sim, const ScoringConfig& config) {
    config.validate();
    if (candidates.size() > kOracleGuard)
        throw DomainError("oracle_best_path: region larger than guard (" +
                          std::to_string(kOracleGuard) + ")");

    std::vector<std::size_t> current, best_seq;
    double best_objective = 0.0;
    bool have_best = false;
    std::vector<bool> used(candidates.size(), false);

    std::function<void(double)> dfs = [&](double objective) {
        if (!current.empty()) {
            if (!have_best || objective > best_objective ||
                (objective == best_objective && sequence_before(candidates, current, best_seq))) {
                best_objective = objective;
                best_seq = current;
                have_best = true;
            }
        }
        if (current.size() >= config.k_max) return;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (used[i]) continue;
            double mu = current.empty()
                            ? 1.0
                            : std::exp(-config.lambda * (1.0 - sim(i, current.back())));
            used[i] = true;
            current.push_back(i);
            dfs(objective + candidates[i].c * mu);
            current.pop_back();
            used[i] = false;
        }
    };
    dfs(0.0);

    MemoryPath path;
    std::size_t prev = 0;
    for (std::size_t k = 0; k < best_seq.size(); ++k) {
        std::size_t i = best_seq[k];
        double mu = k == 0 ? 1.0 : std::exp(-config.lambda * (1.0 - sim(i, prev)));
        path.steps.push_back({candidates[i].id, candidates[i].c, mu});
        path.objective += candidates[i].c * mu;
        prev = i;
    }
    return path;
}

namespace {

std::pair<std::vector<PathCandidate>, SimilarityFn> region_candidates(
    const MemoryRegion& region, const std::vector<ContributionScore>& scores,
    const std::vector<MemoryFragment>& fragments) {
    std::map<std::string, std::size_t> frag_index;
    for (std::size_t i = 0; i < fragments.size(); ++i)
        frag_index[fragments[i].fragment_id] = i;
    std::map<std::string, double> c_by_id;
    for (const auto& s : scores) c_by_id[s.fragment_id] = s.c;

    std::vector<PathCandidate> candidates;
    auto members = std::make_shared<std::vector<std::size_t>>();
    for (const auto& id : region.members) {
        auto it = frag_index.find(id);
        if (it == frag_index.end()) throw DataError("region member not among fragments: " + id);
        candidates.push_back({id, fragments[it->second].round, c_by_id.at(id)});
        members->push_back(it->second);
    }
    auto frags = &fragments;
    SimilarityFn sim = [frags, members](std::size_t a, std::size_t b) {
        return cosine((*frags)[(*members)[a]].embedding, (*frags)[(*members)[b]].embedding);
    };
    return {std::move(candidates), std::move(sim)};
}

}  // namespace

MemoryPath build_path(const MemoryRegion& region, const std::vector<ContributionScore>& scores,
                      const std::vector<MemoryFragment>& fragments, const ScoringConfig& config,
                      std::vector<GreedyTraceStep>* trace) {
    auto [candidates, sim] = region_candidates(region, scores, fragments);
    return build_path_scored(candidates, sim, config, trace);
}

MemoryPath oracle_best_path(const MemoryRegion& region,
                            const std::vector<ContributionScore>& scores,
                            const std::vector<MemoryFragment>& fragments,
                            const ScoringConfig& config) {
    auto [candidates, sim] = region_candidates(region, scores, fragments);
    return oracle_best_path_scored(candidates, sim, config);
}

std::string path_debug_json(const std::vector<MemoryFragment>& fragments,
                            const std::vector<ContributionScore>& scores,
                            const MemoryRegion& region, const MemoryPath& path,
                            const std::vector<GreedyTraceStep>& trace) {
    json doc;
    doc["schema"] = "memgrow-path-debug/1";
    doc["fragments"] = json::array();
    for (const auto& fragment : fragments) {
        json f;
        f["fragment_id"] = fragment.fragment_id;
        f["text"] = fragment.text;
        f["category"] = to_string(fragment.category);
        f["round"] = fragment.round;
        f["source_query"] = fragment.source_query;
        f["own_query_relevance"] = fragment.own_query_relevance;
        f["embedding"] = fragment.embedding.values;
        doc["fragments"].push_back(std::move(f));
    }
    doc["scores"] = json::array();
    for (const auto& s : scores) {
        json rec;
        rec["fragment_id"] = s.fragment_id;
        rec["c_rel"] = s.c_rel;
        rec["c_bp"] = s.c_bp;
        rec["c"] = s.c;
        rec["bp_weight"] = s.bp_weight;
        doc["scores"].push_back(std::move(rec));
    }
    doc["region"] = {{"threshold", region.threshold}, {"members", region.members}};
    doc["greedy_trace"] = json::array();
    for (const auto& step : trace) {
        json rec;
        rec["candidate_scores"] = json::array();
        for (const auto& [id, s] : step.candidate_scores)
            rec["candidate_scores"].push_back({{"fragment_id", id}, {"score", s}});
        rec["chosen"] = step.chosen;
        doc["greedy_trace"].push_back(std::move(rec));
    }
    doc["path"] = json::array();
    for (const auto& step : path.steps)
        doc["path"].push_back({{"fragment_id", step.fragment_id}, {"c", step.c}, {"mu", step.mu}});
    doc["objective"] = path.objective;
    return doc.dump(2);
}

}  // namespace memgrow
