#include <doctest.h>

#include "agghawkes/aggregate.hpp"
#include "agghawkes/simulate.hpp"
#include "testutil.hpp"

using namespace hawkes;

TEST_CASE("temporal binning") {
    auto pattern = EventPattern::create(
        {{0, 0.2, std::nullopt}, {0, 0.7, std::nullopt}, {0, 1.4, std::nullopt}}, 2.0,
        std::nullopt);
    auto counts = aggregate(pattern, BinSpec::uniform(1, 1.0, std::nullopt, 2.0, std::nullopt));
    CHECK(counts.at(0, 0) == 2);
    CHECK(counts.at(0, 1) == 1);
    CHECK(counts.total() == 3);
}

TEST_CASE("empty pattern aggregates to zeros") {
    auto pattern = EventPattern::create({}, 2.0, std::nullopt);
    auto counts = aggregate(pattern, BinSpec::uniform(1, 0.5, std::nullopt, 2.0, std::nullopt));
    CHECK(counts.total() == 0);
    CHECK(counts.counts[0].size() == 4);
}

TEST_CASE("spatial cells separate nearby events") {
    Window w{0.0, 0.0, 1.0, 1.0};
    auto pattern = EventPattern::create(
        {{0, 0.5, Vec2{0.1, 0.1}}, {0, 0.5 + 1e-9, Vec2{0.9, 0.9}}}, 2.0, w);
    auto counts = aggregate(pattern, BinSpec::uniform(1, 1.0, 0.5, 2.0, w));
    CHECK(counts.at(0, 0, 0, 0) == 1);
    CHECK(counts.at(0, 0, 1, 1) == 1);
    CHECK(counts.total() == 2);
}

TEST_CASE("consistency predicate") {
    auto pattern = EventPattern::create(
        {{0, 0.2, std::nullopt}, {0, 1.7, std::nullopt}}, 2.0, std::nullopt);
    auto spec = BinSpec::uniform(1, 1.0, std::nullopt, 2.0, std::nullopt);
    auto counts = aggregate(pattern, spec);
    CHECK(is_consistent(pattern, counts));

    SUBCASE("moving an event across a bin edge breaks it") {
        auto moved = EventPattern::create(
            {{0, 0.2, std::nullopt}, {0, 0.7, std::nullopt}}, 2.0, std::nullopt);
        CHECK_FALSE(is_consistent(moved, counts));
    }
    SUBCASE("a different pattern with the same bin occupancy also matches") {
        auto alt = EventPattern::create(
            {{0, 0.9, std::nullopt}, {0, 1.1, std::nullopt}}, 2.0, std::nullopt);
        CHECK(is_consistent(alt, counts));
    }
}

TEST_CASE("round trip and conservation on simulated data") {
    SimulationRequest req;
    req.params = ModelParams::univariate(0.4, 0.5, TemporalKernel::exponential(1.0));
    req.t_end = 50.0;
    req.seed = 31;
    auto result = simulate(req);
    auto spec = BinSpec::uniform(1, 1.5, std::nullopt, 50.0, std::nullopt);
    auto counts = aggregate(result.pattern, spec);
    CHECK(is_consistent(result.pattern, counts));
    CHECK(counts.total(0) == static_cast<int64_t>(result.pattern.size()));
}

TEST_CASE("refinement: halved bins re-sum to the coarse counts") {
    Rng rng(17);
    auto pattern = testutil::random_pattern(rng, 40, 1, false, 8.0);
    auto coarse = aggregate(pattern, BinSpec::uniform(1, 1.0, std::nullopt, 8.0, std::nullopt));
    auto fine = aggregate(pattern, BinSpec::uniform(1, 0.5, std::nullopt, 8.0, std::nullopt));
    for (int b = 0; b < 8; ++b)
        CHECK(coarse.at(0, b) == fine.at(0, 2 * b) + fine.at(0, 2 * b + 1));
}

TEST_CASE("ragged final bin when dt does not divide T") {
    auto spec = BinSpec::uniform(1, 1.0, std::nullopt, 2.5, std::nullopt);
    CHECK(spec.time_bin_count(0) == 3);
    auto [lo, hi] = spec.time_bin_bounds(0, 2);
    CHECK(lo == 2.0);
    CHECK(hi == 2.5);
    auto pattern = EventPattern::create({{0, 2.4, std::nullopt}}, 2.5, std::nullopt);
    auto counts = aggregate(pattern, spec);
    CHECK(counts.at(0, 2) == 1);
}

TEST_CASE("event outside the grid names itself") {
    Window w{0.0, 0.0, 1.0, 1.0};
    auto pattern = EventPattern::create({{0, 0.5, Vec2{1.5, 0.5}}}, 2.0, w);
    auto spec = BinSpec::uniform(1, 1.0, 0.5, 2.0, w);
    CHECK_THROWS_WITH_AS(aggregate(pattern, spec),
                         doctest::Contains("event 0"), std::invalid_argument);
}

TEST_CASE("per-process bin specs are independent") {
    auto pattern = EventPattern::create(
        {{0, 0.3, std::nullopt}, {1, 1.9, std::nullopt}}, 2.0, std::nullopt);
    BinSpec spec;
    spec.horizon = 2.0;
    spec.per_process = {{0.5, std::nullopt}, {2.0, std::nullopt}};
    auto counts = aggregate(pattern, spec);
    CHECK(counts.counts[0].size() == 4);
    CHECK(counts.counts[1].size() == 1);
    CHECK(counts.at(0, 0) == 1);
    CHECK(counts.at(1, 0) == 1);
}
