#include <cmath>
#include <random>

#include "doctest.h"

#include "helpers.hpp"
#include "memgrow/engine.hpp"
#include "memgrow/errors.hpp"

using namespace memgrow;
using namespace memgrow::testing;

TEST_CASE("scoring config validation") {
    ScoringConfig config;
    CHECK_NOTHROW(config.validate());
    config.alpha = -0.1;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config = ScoringConfig{};
    config.alpha = config.beta = 0.0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config = ScoringConfig{};
    config.k_max = 0;
    CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_CASE("single fragment scoring") {
    auto query = normalize(EmbeddingVector{{1.0, 0.0, 0.0}, false});
    auto scores = score({make_fragment("f1", {1.0, 0.0, 0.0}, 0.9)}, query, ScoringConfig{});
    REQUIRE(scores.size() == 1);
    CHECK(scores[0].c_rel == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(scores[0].c_bp == 0.0);
    CHECK(scores[0].c == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("bridge weights drop low-relevance peers") {
    auto query = normalize(EmbeddingVector{{1.0, 0.0, 0.0}, false});
    std::vector<MemoryFragment> fragments = {
        make_fragment("f1", {1.0, 0.0, 0.0}, 0.8),
        make_fragment("f2", {0.6, 0.8, 0.0}, 0.5),
        make_fragment("f3", {0.0, 0.0, 1.0}, 0.1),
    };
    auto scores = score(fragments, query, ScoringConfig{});
    REQUIRE(scores.size() == 3);
    CHECK(scores[0].bp_weight == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(scores[1].bp_weight == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(scores[2].bp_weight == 0.0);
    // fragment 3's weight vanishes, so f1's bridge term is exactly cos(m1, m2)
    CHECK(scores[0].c_bp == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(scores[1].c_bp == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(scores[2].c_bp == doctest::Approx(0.0).epsilon(1e-12));
    for (const auto& row : scores)
        CHECK(row.c == doctest::Approx(0.6 * row.c_rel + 0.4 * row.c_bp).epsilon(1e-12));
}

TEST_CASE("all-zero peer weights give c_bp 0") {
    auto query = normalize(EmbeddingVector{{1.0, 0.0}, false});
    std::vector<MemoryFragment> fragments = {
        make_fragment("f1", {1.0, 0.0}, 0.1),
        make_fragment("f2", {0.0, 1.0}, 0.2),
    };
    for (const auto& row : score(fragments, query, ScoringConfig{})) CHECK(row.c_bp == 0.0);
}

TEST_CASE("score matches straight-line recomputation on random instances") {
    std::mt19937 rng(101);
    std::uniform_int_distribution<std::size_t> count(3, 8);
    ScoringConfig config;
    for (int trial = 0; trial < 50; ++trial) {
        auto fragments = random_fragments(rng, count(rng), 6);
        auto query = random_unit(rng, 6);
        auto got = score(fragments, query, config);
        auto want = reference_scores(fragments, query, config);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) {
            CHECK(std::abs(got[i].c_rel - want[i].c_rel) <= 1e-9);
            CHECK(std::abs(got[i].c_bp - want[i].c_bp) <= 1e-9);
            CHECK(std::abs(got[i].c - want[i].c) <= 1e-9);
            CHECK(std::abs(got[i].bp_weight - want[i].bp_weight) <= 1e-9);
            CHECK(std::abs(got[i].c - (config.alpha * got[i].c_rel + config.beta * got[i].c_bp)) <=
                  1e-12);
        }
    }
}

TEST_CASE("region filter is strictly greater-than") {
    std::vector<MemoryFragment> fragments = {
        make_fragment("f1", {1.0, 0.0}, 0.5),
        make_fragment("f2", {0.0, 1.0}, 0.5),
        make_fragment("f3", {0.7, 0.7}, 0.5),
    };
    std::vector<ContributionScore> scores = {
        {"f1", 0.0, 0.0, 0.5, 0.0}, {"f2", 0.0, 0.0, 0.3, 0.0}, {"f3", 0.0, 0.0, 0.2, 0.0}};
    ScoringConfig config;

    auto region = filter_region(scores, fragments, config);
    CHECK(region.members == std::vector<std::string>{"f1"});  // 0.3 excluded at tau_r = 0.3
    CHECK(region.threshold == 0.3);

    SUBCASE("all below threshold") {
        config.tau_r = 0.9;
        CHECK(filter_region(scores, fragments, config).members.empty());
    }
    SUBCASE("degenerate threshold keeps everything") {
        config.tau_r = -1.0;
        CHECK(filter_region(scores, fragments, config).members ==
              std::vector<std::string>{"f1", "f2", "f3"});
    }
}

TEST_CASE("greedy path reproduces the worked trace") {
    ScoringConfig config;
    config.k_max = 3;
    std::vector<GreedyTraceStep> trace;
    auto path = build_path_scored(abc_candidates(), abc_similarity(), config, &trace);

    REQUIRE(path.steps.size() == 3);
    CHECK(path.steps[0].fragment_id == "A");
    CHECK(path.steps[1].fragment_id == "B");
    CHECK(path.steps[2].fragment_id == "C");
    CHECK(path.steps[0].mu == 1.0);
    CHECK(path.steps[1].c * path.steps[1].mu == doctest::Approx(0.8 * std::exp(-0.1)));
    CHECK(path.steps[2].c * path.steps[2].mu == doctest::Approx(0.7 * std::exp(-0.2)));
    CHECK(std::abs(path.steps[1].c * path.steps[1].mu - 0.7239) < 1e-3);
    CHECK(std::abs(path.steps[2].c * path.steps[2].mu - 0.5731) < 1e-3);
    CHECK(path.objective ==
          doctest::Approx(0.9 + 0.8 * std::exp(-0.1) + 0.7 * std::exp(-0.2)).epsilon(1e-12));

    REQUIRE(trace.size() == 3);
    CHECK(trace[0].chosen == "A");
    REQUIRE(trace[1].candidate_scores.size() == 2);
    CHECK(trace[1].chosen == "B");
    CHECK(trace[2].chosen == "C");
    // step 2 considered C at 0.7 * e^{-0.8}
    for (const auto& [id, value] : trace[1].candidate_scores)
        if (id == "C") CHECK(std::abs(value - 0.7 * std::exp(-0.8)) < 1e-12);

    SUBCASE("oracle agrees on this instance") {
        auto best = oracle_best_path_scored(abc_candidates(), abc_similarity(), config);
        CHECK(best.objective >= path.objective - 1e-12);
    }
    SUBCASE("k_max clamps the path") {
        config.k_max = 1;
        auto clamped = build_path_scored(abc_candidates(), abc_similarity(), config);
        REQUIRE(clamped.steps.size() == 1);
        CHECK(clamped.steps[0].fragment_id == "A");
        CHECK(clamped.objective == doctest::Approx(0.9));
    }
}

TEST_CASE("path edge cases") {
    ScoringConfig config;
    CHECK(build_path_scored({}, abc_similarity(), config).steps.empty());
    CHECK(build_path_scored({}, abc_similarity(), config).objective == 0.0);

    auto single = build_path_scored({{"only", 1, 0.5}},
                                    [](std::size_t, std::size_t) { return 1.0; }, config);
    REQUIRE(single.steps.size() == 1);
    CHECK(single.steps[0].mu == 1.0);
    CHECK(single.objective == doctest::Approx(0.5));
}

TEST_CASE("greedy ties break by round then id") {
    ScoringConfig config;
    auto flat = [](std::size_t, std::size_t) { return 0.5; };
    std::vector<PathCandidate> candidates = {{"z", 2, 0.8}, {"a", 1, 0.8}, {"b", 1, 0.8}};
    auto path = build_path_scored(candidates, flat, config);
    REQUIRE(path.steps.size() == 3);
    CHECK(path.steps[0].fragment_id == "a");
    CHECK(path.steps[1].fragment_id == "b");
    CHECK(path.steps[2].fragment_id == "z");
}

TEST_CASE("oracle dominates greedy on random instances") {
    std::mt19937 rng(202);
    std::uniform_int_distribution<std::size_t> count(2, 6);
    std::uniform_int_distribution<std::size_t> kmax(1, 5);
    std::uniform_real_distribution<double> cval(0.0, 1.0);
    std::uniform_real_distribution<double> sval(-1.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = count(rng);
        std::vector<PathCandidate> candidates;
        for (std::size_t i = 0; i < n; ++i)
            candidates.push_back({"f" + std::to_string(i), static_cast<int>(i), cval(rng)});
        std::vector<std::vector<double>> sim(n, std::vector<double>(n, 1.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) sim[i][j] = sim[j][i] = sval(rng);
        auto simfn = [&sim](std::size_t i, std::size_t j) { return sim[i][j]; };
        ScoringConfig config;
        config.k_max = kmax(rng);

        auto greedy = build_path_scored(candidates, simfn, config);
        auto oracle = oracle_best_path_scored(candidates, simfn, config);
        CHECK(oracle.objective >= greedy.objective - 1e-12);
        CHECK(greedy.steps.size() <= config.k_max);
        for (const auto& step : greedy.steps) {
            CHECK(step.mu > 0.0);
            CHECK(step.mu <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("oracle guard rejects oversized regions") {
    std::vector<PathCandidate> candidates;
    for (int i = 0; i < 9; ++i) candidates.push_back({"f" + std::to_string(i), 1, 0.5});
    CHECK_THROWS_AS(
        oracle_best_path_scored(candidates, [](std::size_t, std::size_t) { return 0.0; },
                                ScoringConfig{}),
        DomainError);
}

TEST_CASE("greedy selection is scale invariant") {
    std::mt19937 rng(303);
    std::uniform_real_distribution<double> cval(0.1, 1.0);
    std::uniform_real_distribution<double> sval(-1.0, 1.0);
    std::uniform_real_distribution<double> scale(0.5, 20.0);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 5;
        std::vector<PathCandidate> candidates;
        for (std::size_t i = 0; i < n; ++i)
            candidates.push_back({"f" + std::to_string(i), 1, cval(rng)});
        std::vector<std::vector<double>> sim(n, std::vector<double>(n, 1.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) sim[i][j] = sim[j][i] = sval(rng);
        auto simfn = [&sim](std::size_t i, std::size_t j) { return sim[i][j]; };
        ScoringConfig config;
        config.k_max = 4;

        auto base = build_path_scored(candidates, simfn, config);
        double factor = scale(rng);
        auto scaled_candidates = candidates;
        for (auto& c : scaled_candidates) c.c *= factor;
        auto scaled = build_path_scored(scaled_candidates, simfn, config);
        REQUIRE(scaled.steps.size() == base.steps.size());
        for (std::size_t i = 0; i < base.steps.size(); ++i)
            CHECK(scaled.steps[i].fragment_id == base.steps[i].fragment_id);
    }
}

TEST_CASE("raising lambda never raises the objective") {
    std::mt19937 rng(404);
    std::uniform_real_distribution<double> sval(-1.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 5;
        std::vector<PathCandidate> candidates;
        for (std::size_t i = 0; i < n; ++i)
            candidates.push_back({"f" + std::to_string(i), 1, 0.7});
        std::vector<std::vector<double>> sim(n, std::vector<double>(n, 1.0));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) sim[i][j] = sim[j][i] = sval(rng);
        auto simfn = [&sim](std::size_t i, std::size_t j) { return sim[i][j]; };

        double previous = 0.0;
        bool first = true;
        for (double lambda : {0.0, 0.5, 1.0, 2.0, 5.0}) {
            ScoringConfig config;
            config.lambda = lambda;
            config.k_max = 5;
            double objective = build_path_scored(candidates, simfn, config).objective;
            if (!first) CHECK(objective <= previous + 1e-12);
            previous = objective;
            first = false;
        }
    }
}

TEST_CASE("embedding-level wrappers agree with the scored API") {
    std::mt19937 rng(505);
    auto fragments = random_fragments(rng, 5, 4);
    auto query = random_unit(rng, 4);
    ScoringConfig config;
    config.tau_r = -1.0;  // keep everything in the region

    auto scores = score(fragments, query, config);
    auto region = filter_region(scores, fragments, config);
    REQUIRE(region.members.size() == fragments.size());

    auto greedy = build_path(region, scores, fragments, config);
    auto oracle = oracle_best_path(region, scores, fragments, config);
    CHECK(oracle.objective >= greedy.objective - 1e-12);
    CHECK(!greedy.steps.empty());
    CHECK(greedy.steps[0].mu == 1.0);
}

TEST_CASE("path debug dump shape") {
    std::mt19937 rng(606);
    auto fragments = random_fragments(rng, 3, 4);
    auto query = random_unit(rng, 4);
    ScoringConfig config;
    config.tau_r = -1.0;

    auto scores = score(fragments, query, config);
    auto region = filter_region(scores, fragments, config);
    std::vector<GreedyTraceStep> trace;
    auto path = build_path(region, scores, fragments, config, &trace);

    auto dump = path_debug_json(fragments, scores, region, path, trace);
    CHECK(dump.find("\"memgrow-path-debug/1\"") != std::string::npos);
    CHECK(dump.find("\"greedy_trace\"") != std::string::npos);
    CHECK(dump.find("\"objective\"") != std::string::npos);
    CHECK(dump == path_debug_json(fragments, scores, region, path, trace));
}
