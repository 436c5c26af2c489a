#include <doctest.h>

#include <cmath>

#include "agghawkes/simulate.hpp"
#include "testutil.hpp"

using namespace hawkes;

namespace {

ModelParams set1() { return ModelParams::univariate(0.3, 0.7, TemporalKernel::exponential(1.0)); }

}  // namespace

TEST_CASE("mean event count matches the cluster-process mean") {
    // E[N] = mu * T / (1 - alpha), up to end-of-horizon truncation
    const int reps = 200;
    std::vector<double> counts(reps);
    for (int r = 0; r < reps; ++r) {
        SimulationRequest req;
        req.params = set1();
        req.t_end = 500.0;
        req.seed = 1000 + r;
        counts[r] = static_cast<double>(simulate(req).pattern.size());
    }
    double mean = testutil::vec_mean(counts);
    double se = testutil::vec_sd(counts) / std::sqrt(static_cast<double>(reps));
    CHECK(std::fabs(mean - 500.0) < 3.0 * se + 4.0);
}

TEST_CASE("vanishing branching ratio reduces to a Poisson process") {
    const int reps = 300;
    std::vector<double> counts(reps);
    for (int r = 0; r < reps; ++r) {
        SimulationRequest req;
        req.params = ModelParams::univariate(0.5, 1e-12, TemporalKernel::exponential(1.0));
        req.t_end = 100.0;
        req.seed = 77 + r;
        counts[r] = static_cast<double>(simulate(req).pattern.size());
    }
    double mean = testutil::vec_mean(counts);
    double se = testutil::vec_sd(counts) / std::sqrt(static_cast<double>(reps));
    CHECK(std::fabs(mean - 50.0) < 3.0 * se);
}

TEST_CASE("bivariate mean counts solve n = mu T + alpha^T n") {
    ModelParams params;
    params.L = 2;
    params.mu = {0.3, 0.5};
    params.alpha = PairMatrix<double>(2);
    params.alpha(0, 0) = 0.7;
    params.alpha(0, 1) = 0.15;
    params.alpha(1, 0) = 0.3;
    params.alpha(1, 1) = 0.5;
    params.temporal = PairMatrix<TemporalKernel>(2, TemporalKernel::exponential(1.0));

    // solve (I - alpha^T) n = mu T
    const double T = 500.0;
    // 0.3 n1 - 0.3 n2 = 150 ; -0.15 n1 + 0.5 n2 = 250
    const double n2 = (250.0 + 0.15 * 500.0 * 1.0) / 0.35 / 1.0;  // from n1 = 500 + n2
    const double n1 = 500.0 + n2;

    const int reps = 200;
    std::vector<double> c1(reps), c2(reps);
    for (int r = 0; r < reps; ++r) {
        SimulationRequest req;
        req.params = params;
        req.t_end = T;
        req.seed = 40000 + r;
        auto pattern = simulate(req).pattern;
        int a = 0, b = 0;
        for (const auto& e : pattern.events) (e.process == 0 ? a : b)++;
        c1[r] = a;
        c2[r] = b;
    }
    double se1 = testutil::vec_sd(c1) / std::sqrt(static_cast<double>(reps));
    double se2 = testutil::vec_sd(c2) / std::sqrt(static_cast<double>(reps));
    CHECK(std::fabs(testutil::vec_mean(c1) - n1) < 3.0 * se1 + 8.0);
    CHECK(std::fabs(testutil::vec_mean(c2) - n2) < 3.0 * se2 + 8.0);
}

TEST_CASE("determinism: identical request, identical output") {
    SimulationRequest req;
    req.params = ModelParams::univariate(0.3, 0.6, TemporalKernel::exponential(1.0),
                                         SpatialKernel(1.0));
    req.t_end = 60.0;
    req.window = Window{0.0, 0.0, 30.0, 30.0};
    req.seed = 9;
    auto a = simulate(req);
    auto b = simulate(req);
    REQUIRE(a.pattern.size() == b.pattern.size());
    for (size_t i = 0; i < a.pattern.size(); ++i) {
        CHECK(a.pattern.events[i].t == b.pattern.events[i].t);
        CHECK(a.pattern.events[i].process == b.pattern.events[i].process);
        CHECK(*a.pattern.events[i].s == *b.pattern.events[i].s);
        CHECK(a.branching.parent[i] == b.branching.parent[i]);
    }
}

TEST_CASE("returned branching is valid and scores under the joint") {
    SimulationRequest req;
    req.params = set1();
    req.t_end = 200.0;
    req.seed = 12;
    auto result = simulate(req);
    result.branching.validate(result.pattern);
    double ll = joint_loglik(result.pattern, result.branching, req.params);
    CHECK(std::isfinite(ll));
}

TEST_CASE("offspring counts are Poisson with the kernel mass mean") {
    Rng rng(123);
    auto kern = TemporalKernel::exponential(1.0);
    SUBCASE("direct draw of the offspring count") {
        std::vector<int64_t> counts(10000);
        for (auto& c : counts) c = detail::sample_offspring_count(0.7, kern, 0.0, 5.0, rng);
        double mean = 0.7 * kern.cdf(5.0);
        CHECK(testutil::poisson_gof_pvalue(counts, mean) > 0.001);
    }
    SUBCASE("pooled children counts of early events across replicates") {
        std::vector<int64_t> counts;
        long double mass_sum = 0.0;
        for (int r = 0; counts.size() < 10000 && r < 300; ++r) {
            SimulationRequest req;
            req.params = set1();
            req.t_end = 120.0;
            req.seed = 5000 + r;
            auto result = simulate(req);
            std::vector<int64_t> kids(result.pattern.size(), 0);
            for (int p : result.branching.parent)
                if (p != kImmigrant) ++kids[p];
            for (size_t i = 0; i < result.pattern.size(); ++i) {
                double tail = 120.0 - result.pattern.events[i].t;
                if (tail < 8.0) continue;  // keep the mean effectively constant
                counts.push_back(kids[i]);
                mass_sum += kern.cdf(tail);
            }
        }
        REQUIRE(counts.size() >= 10000);
        double mean = 0.7 * static_cast<double>(mass_sum / counts.size());
        CHECK(testutil::poisson_gof_pvalue(counts, mean) > 0.001);
    }
}

TEST_CASE("forward simulation") {
    SUBCASE("zero horizon forecasts nothing") {
        auto history = EventPattern::create({{0, 1.0, std::nullopt}}, 10.0, std::nullopt);
        Rng rng(1);
        auto f = simulate_forward(set1(), history, 10.0, 0.0, rng);
        CHECK(f.events.empty());
    }
    SUBCASE("empty history reduces to a fresh simulation") {
        auto history = EventPattern::create({}, 10.0, std::nullopt);
        Rng rng(2);
        std::vector<double> counts(400);
        for (auto& c : counts) {
            auto f = simulate_forward(set1(), history, 10.0, 50.0, rng);
            c = static_cast<double>(f.events.size());
            for (const auto& e : f.events) {
                CHECK(e.t >= 10.0);
                CHECK(e.t < 60.0);
            }
        }
        double mean = testutil::vec_mean(counts);
        double se = testutil::vec_sd(counts) / std::sqrt(400.0);
        CHECK(std::fabs(mean - 0.3 * 50.0 / 0.3) < 3.0 * se + 2.0);
    }
    SUBCASE("stationary history: forecast mean is mu h / (1 - alpha)") {
        // average over histories so the conditional-mean fluctuation washes out
        const int histories = 20, draws = 25;
        std::vector<double> history_means(histories);
        for (int hrep = 0; hrep < histories; ++hrep) {
            SimulationRequest req;
            req.params = set1();
            req.t_end = 500.0;
            req.seed = 900 + hrep;
            auto history = simulate(req).pattern;
            Rng rng(3000 + hrep);
            std::vector<double> counts(draws);
            for (auto& c : counts)
                c = static_cast<double>(
                    simulate_forward(set1(), history, 500.0, 7.0, rng).events.size());
            history_means[hrep] = testutil::vec_mean(counts);
        }
        double mean = testutil::vec_mean(history_means);
        double se = testutil::vec_sd(history_means) / std::sqrt(static_cast<double>(histories));
        CHECK(std::fabs(mean - 7.0) < 3.0 * se + 0.5);
    }
}
