#include <doctest.h>

#include <cmath>

#include "agghawkes/kernels.hpp"
#include "testutil.hpp"

using namespace hawkes;

TEST_CASE("temporal density closed forms") {
    CHECK(TemporalKernel::exponential(1.0).density(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(TemporalKernel::lomax(1.0, 3.0).density(0.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(TemporalKernel::exponential(1.0).density(1.0) ==
          doctest::Approx(0.36787944117144233).epsilon(1e-12));
    CHECK_THROWS_AS(TemporalKernel::exponential(1.0).density(-0.5), std::invalid_argument);
    CHECK_THROWS_AS(TemporalKernel::lomax(1.0, 3.0).log_density(-1e-9), std::invalid_argument);
}

TEST_CASE("temporal cdf closed forms and mass") {
    auto expo = TemporalKernel::exponential(2.0);
    CHECK(expo.cdf(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(expo.cdf(0.0) == 0.0);
    auto lom = TemporalKernel::lomax(1.0, 3.0);
    CHECK(lom.cdf(1.0) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(lom.cdf(0.0) == 0.0);
    CHECK_THROWS_AS(expo.cdf(-1.0), std::invalid_argument);
}

TEST_CASE("density integrates to the cdf (quadrature)") {
    for (auto kern : {TemporalKernel::exponential(1.3), TemporalKernel::lomax(0.8, 2.5)}) {
        for (double t : {0.3, 1.0, 4.0, 12.0}) {
            double quad = testutil::integrate([&](double u) { return kern.density(u); }, 0.0, t);
            CHECK(std::fabs(quad - kern.cdf(t)) < 1e-8);
        }
        // total mass over [0, inf) through the substitution t = u / (1 - u)
        double total = testutil::integrate(
            [&](double u) {
                double t = u / (1.0 - u);
                return kern.density(t) / ((1.0 - u) * (1.0 - u));
            },
            0.0, 1.0 - 1e-9, 1e-12);
        CHECK(std::fabs(total - 1.0) < 1e-8);
    }
}

TEST_CASE("quantile round trip") {
    for (auto kern : {TemporalKernel::exponential(0.7), TemporalKernel::lomax(1.4, 3.3)}) {
        for (double q = 0.02; q < 1.0; q += 0.07)
            CHECK(std::fabs(kern.cdf(kern.quantile(q)) - q) < 1e-10);
    }
}

TEST_CASE("cdf monotone within [0,1]") {
    auto kern = TemporalKernel::lomax(1.0, 2.2);
    double prev = 0.0;
    for (double t = 0.0; t < 50.0; t += 0.37) {
        double c = kern.cdf(t);
        CHECK(c >= prev);
        CHECK(c <= 1.0);
        prev = c;
    }
}

TEST_CASE("truncated sampling: support, means, distribution") {
    Rng rng(42);
    SUBCASE("untruncated exponential mean 1/beta") {
        auto kern = TemporalKernel::exponential(1.0);
        std::vector<double> draws(100000);
        for (auto& d : draws) d = kern.sample_truncated(0.0, std::numeric_limits<double>::infinity(), rng);
        CHECK(std::fabs(testutil::vec_mean(draws) - 1.0) < 0.01);
    }
    SUBCASE("untruncated Lomax mean c/(p-2)") {
        auto kern = TemporalKernel::lomax(1.0, 3.0);
        CHECK(kern.mean() == doctest::Approx(1.0));
        std::vector<double> draws(100000);
        for (auto& d : draws) d = kern.sample_truncated(0.0, std::numeric_limits<double>::infinity(), rng);
        CHECK(std::fabs(testutil::vec_mean(draws) - 1.0) < 0.02);
    }
    SUBCASE("support restriction") {
        auto kern = TemporalKernel::exponential(1.0);
        for (int i = 0; i < 2000; ++i) {
            double d = kern.sample_truncated(2.0, 3.0, rng);
            CHECK(d > 2.0);
            CHECK(d < 3.0);
        }
    }
    SUBCASE("empirical cdf matches the renormalized cdf") {
        for (auto kern : {TemporalKernel::exponential(0.8), TemporalKernel::lomax(1.0, 2.6)}) {
            for (auto [lo, hi] : {std::pair{0.5, 2.5}, std::pair{3.0, 9.0}}) {
                std::vector<double> draws(10000);
                for (auto& d : draws) d = kern.sample_truncated(lo, hi, rng);
                double mass = kern.cdf(hi) - kern.cdf(lo);
                auto cdf = [&](double x) { return (kern.cdf(x) - kern.cdf(lo)) / mass; };
                CHECK(testutil::ks_distance(draws, cdf) < 0.03);
            }
        }
    }
    SUBCASE("interval without representable mass fails") {
        auto kern = TemporalKernel::exponential(1.0);
        CHECK_THROWS_AS(kern.sample_truncated(1e300, 1e300, rng), std::invalid_argument);
    }
    SUBCASE("fixed seed is reproducible") {
        auto kern = TemporalKernel::exponential(1.0);
        Rng a(7), b(7);
        for (int i = 0; i < 100; ++i)
            CHECK(kern.sample_truncated(0.0, 5.0, a) == kern.sample_truncated(0.0, 5.0, b));
    }
}

TEST_CASE("spatial kernel density and sampling") {
    SpatialKernel unit(1.0);
    CHECK(unit.density({0.0, 0.0}) == doctest::Approx(0.15915494309189535).epsilon(1e-12));
    CHECK(unit.density({1.0, 0.0}) == doctest::Approx(unit.density({0.0, 1.0})).epsilon(1e-15));
    SpatialKernel wide(2.0);
    CHECK(wide.density({0.0, 0.0}) == doctest::Approx(1.0 / (8.0 * M_PI)).epsilon(1e-12));
    CHECK_THROWS_AS(SpatialKernel(0.0), std::invalid_argument);

    // unit total mass via the radial form; integrate where the mass lives so
    // the adaptive rule sees it
    double total = testutil::integrate(
        [&](double r) { return r / (1.0 * 1.0) * std::exp(-r * r / 2.0); }, 0.0, 10.0);
    CHECK(std::fabs(total - 1.0) < 1e-6);

    Rng rng(11);
    std::vector<double> xs(100000), ys(100000);
    for (size_t i = 0; i < xs.size(); ++i) {
        Vec2 v = unit.sample(rng);
        xs[i] = v.x;
        ys[i] = v.y;
    }
    CHECK(std::fabs(testutil::vec_sd(xs) - 1.0) < 0.02);
    CHECK(std::fabs(testutil::vec_sd(ys) - 1.0) < 0.02);
    double se = 1.0 / std::sqrt(static_cast<double>(xs.size()));
    CHECK(std::fabs(testutil::vec_mean(xs)) < 4.0 * se);
    CHECK(std::fabs(testutil::vec_mean(ys)) < 4.0 * se);

    Rng a(5), b(5);
    Vec2 va = unit.sample(a), vb = unit.sample(b);
    CHECK(va == vb);
}
