#include <doctest.h>

#include <cmath>

#include "agghawkes/forecast.hpp"
#include "testutil.hpp"

using namespace hawkes;

namespace {

// posterior carrying hand-made snapshots with fixed parameters
mcmc::PosteriorSamples fixed_posterior(const ModelParams& params, const EventPattern& history,
                                       int n_snapshots) {
    mcmc::PosteriorSamples post;
    post.snapshots.resize(1);
    for (int k = 0; k < n_snapshots; ++k) post.snapshots[0].push_back({params, history});
    return post;
}

}  // namespace

TEST_CASE("zero-horizon forecasts are empty") {
    auto history = EventPattern::create({{0, 1.0, std::nullopt}}, 10.0, std::nullopt);
    auto params = ModelParams::univariate(0.5, 0.5, TemporalKernel::exponential(1.0));
    PredictiveRequest req;
    req.horizon = 0.0;
    req.draws_per_snapshot = 3;
    auto forecasts = posterior_predictive(fixed_posterior(params, history, 5), 10.0, req);
    CHECK(forecasts.size() == 15);
    for (const auto& f : forecasts) CHECK(f.events.empty());
}

TEST_CASE("negligible excitation reduces to Poisson counts") {
    auto history = EventPattern::create({{0, 1.0, std::nullopt}}, 10.0, std::nullopt);
    auto params = ModelParams::univariate(0.8, 1e-12, TemporalKernel::exponential(1.0));
    PredictiveRequest req;
    req.horizon = 5.0;
    req.draws_per_snapshot = 1000;
    req.seed = 21;
    auto forecasts = posterior_predictive(fixed_posterior(params, history, 1), 10.0, req);
    auto summary = count_in(forecasts, std::nullopt, 10.0, 15.0);
    CHECK(testutil::poisson_gof_pvalue(summary.counts, 0.8 * 5.0) > 0.001);
}

TEST_CASE("missing snapshots is an instructive error") {
    mcmc::PosteriorSamples post;
    post.snapshots.resize(1);
    PredictiveRequest req;
    req.horizon = 1.0;
    CHECK_THROWS_WITH_AS(posterior_predictive(post, 10.0, req),
                         doctest::Contains("re-fit"), std::invalid_argument);
}

TEST_CASE("count_in additivity and monotonicity") {
    Window w{0.0, 0.0, 10.0, 10.0};
    auto history = EventPattern::create({{0, 0.5, Vec2{5.0, 5.0}}}, 1.0, w);
    auto params = ModelParams::univariate(1.5, 0.4, TemporalKernel::exponential(1.0),
                                          SpatialKernel(1.0));
    PredictiveRequest req;
    req.horizon = 4.0;
    req.draws_per_snapshot = 300;
    req.seed = 5;
    auto forecasts = posterior_predictive(fixed_posterior(params, history, 1), 1.0, req);

    SUBCASE("whole window equals total sizes") {
        auto whole = count_in(forecasts, std::nullopt, 1.0, 5.0);
        for (size_t d = 0; d < forecasts.size(); ++d)
            CHECK(whole.counts[d] == static_cast<int64_t>(forecasts[d].events.size()));
    }
    SUBCASE("disjoint halves add up, forecast by forecast") {
        Window left{0.0, 0.0, 5.0, 10.0}, right{5.0, 0.0, 10.0, 10.0};
        auto in_w = count_in(forecasts, w, 1.0, 5.0);
        auto a = count_in(forecasts, left, 1.0, 5.0);
        auto b = count_in(forecasts, right, 1.0, 5.0);
        for (size_t d = 0; d < forecasts.size(); ++d)
            CHECK(a.counts[d] + b.counts[d] == in_w.counts[d]);
        auto t1 = count_in(forecasts, std::nullopt, 1.0, 3.0);
        auto t2 = count_in(forecasts, std::nullopt, 3.0, 5.0);
        auto tt = count_in(forecasts, std::nullopt, 1.0, 5.0);
        for (size_t d = 0; d < forecasts.size(); ++d)
            CHECK(t1.counts[d] + t2.counts[d] == tt.counts[d]);
    }
    SUBCASE("nested regions have monotone means") {
        Window small{3.0, 3.0, 7.0, 7.0};
        auto inner = count_in(forecasts, small, 1.0, 5.0);
        auto outer = count_in(forecasts, w, 1.0, 5.0);
        CHECK(inner.mean <= outer.mean);
    }
}

TEST_CASE("forecast-mean Monte Carlo error shrinks with more draws") {
    auto history = EventPattern::create({{0, 1.0, std::nullopt}}, 10.0, std::nullopt);
    auto params = ModelParams::univariate(0.5, 0.5, TemporalKernel::exponential(1.0));
    auto batch_mean_sd = [&](int draws, uint64_t seed) {
        std::vector<double> means;
        for (int b = 0; b < 24; ++b) {
            PredictiveRequest req;
            req.horizon = 5.0;
            req.draws_per_snapshot = draws;
            req.seed = seed + b * 1000;
            auto f = posterior_predictive(fixed_posterior(params, history, 1), 10.0, req);
            auto s = count_in(f, std::nullopt, 10.0, 15.0);
            means.push_back(s.mean);
        }
        return testutil::vec_sd(means);
    };
    double sd_small = batch_mean_sd(40, 100);
    double sd_large = batch_mean_sd(640, 200);
    // 16x the draws should cut the error by about 4
    CHECK(sd_small / sd_large > 1.8);
    CHECK(sd_small / sd_large < 9.0);
}
