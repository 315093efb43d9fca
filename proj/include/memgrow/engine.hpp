#pragma once

#include <functional>
#include <string>
#include <vector>

#include "memgrow/grower.hpp"

namespace memgrow {

struct ScoringConfig {
    double alpha{0.6};
    double beta{0.4};
    double tau_s{0.3};
    double tau_r{0.3};
    double lambda{1.0};
    std::size_t k_max{10};

    void validate() const;
};

struct ContributionScore {
    std::string fragment_id;
    double c_rel{0.0};
    double c_bp{0.0};
    double c{0.0};
    double bp_weight{0.0};  // ReLU(own_query_relevance - tau_s), this fragment's peer weight
};

struct MemoryRegion {
    std::vector<std::string> members;  // fragment ids, original order
    double threshold{0.0};
};

struct PathStep {
    std::string fragment_id;
    double c{0.0};
    double mu{1.0};
};

struct MemoryPath {
    std::vector<PathStep> steps;
    double objective{0.0};
};

// One region member as the path builders see it: contribution score plus the
// (round, id) pair used for deterministic tie-breaking.
struct PathCandidate {
    std::string id;
    int round{0};
    double c{0.0};
};

// Pairwise similarity between candidates i and j (indices into the candidate list).
using SimilarityFn = std::function<double(std::size_t, std::size_t)>;

struct GreedyTraceStep {
    std::vector<std::pair<std::string, double>> candidate_scores;
    std::string chosen;
};

std::vector<ContributionScore> score(const std::vector<MemoryFragment>& fragments,
                                     const EmbeddingVector& original_query_embedding,
                                     const ScoringConfig& config);

MemoryRegion filter_region(const std::vector<ContributionScore>& scores,
                           const std::vector<MemoryFragment>& fragments,
                           const ScoringConfig& config);

MemoryPath build_path(const MemoryRegion& region, const std::vector<ContributionScore>& scores,
                      const std::vector<MemoryFragment>& fragments, const ScoringConfig& config,
                      std::vector<GreedyTraceStep>* trace = nullptr);

MemoryPath oracle_best_path(const MemoryRegion& region,
                            const std::vector<ContributionScore>& scores,
                            const std::vector<MemoryFragment>& fragments,
                            const ScoringConfig& config);

// Similarity-matrix level entry points; the embedding-level wrappers above
// delegate here. Tests use these directly to pin arbitrary cosine tables.
MemoryPath build_path_scored(const std::vector<PathCandidate>& candidates, const SimilarityFn& sim,
                             const ScoringConfig& config,
                             std::vector<GreedyTraceStep>* trace = nullptr);

// Exhaustive enumeration of ordered subsets of size <= k_max; testing only.
// Guarded to at most 8 candidates.
MemoryPath oracle_best_path_scored(const std::vector<PathCandidate>& candidates,
                                   const SimilarityFn& sim, const ScoringConfig& config);

std::string path_debug_json(const std::vector<MemoryFragment>& fragments,
                            const std::vector<ContributionScore>& scores,
                            const MemoryRegion& region, const MemoryPath& path,
                            const std::vector<GreedyTraceStep>& trace);

}  // namespace memgrow
