#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>

#include "agghawkes/io.hpp"
#include "agghawkes/simulate.hpp"
#include "testutil.hpp"

using namespace hawkes;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("aggh_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<uintptr_t>(this)));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

io::JitterConfig no_jitter() {
    io::JitterConfig j;
    j.enabled = false;
    return j;
}

}  // namespace

TEST_CASE("event CSV round trip") {
    TempDir dir;
    SimulationRequest req;
    req.params = ModelParams::univariate(0.5, 0.4, TemporalKernel::exponential(1.0),
                                         SpatialKernel(1.0));
    req.t_end = 40.0;
    req.window = Window{0.0, 0.0, 20.0, 20.0};
    req.seed = 3;
    auto result = simulate(req);

    auto path = dir.path / "events.csv";
    io::write_events_csv(path, result.pattern);
    auto back = io::read_events_csv(path, 40.0, req.window, no_jitter());
    REQUIRE(back.size() == result.pattern.size());
    for (size_t i = 0; i < back.size(); ++i) {
        CHECK(back.events[i].process == result.pattern.events[i].process);
        CHECK(back.events[i].t == result.pattern.events[i].t);
        CHECK(*back.events[i].s == *result.pattern.events[i].s);
    }
}

TEST_CASE("event CSV validation errors carry line numbers") {
    TempDir dir;
    auto path = dir.path / "bad.csv";
    SUBCASE("malformed row") {
        std::ofstream(path) << "process,t,x,y\n1,0.5,,\nnot_a_number,1.0,,\n";
        CHECK_THROWS_WITH_AS(io::read_events_csv(path, 10.0, std::nullopt, no_jitter()),
                             doctest::Contains(":3"), std::runtime_error);
    }
    SUBCASE("time at or past the horizon") {
        std::ofstream(path) << "process,t,x,y\n1,0.5,,\n1,10.0,,\n";
        CHECK_THROWS_WITH_AS(io::read_events_csv(path, 10.0, std::nullopt, no_jitter()),
                             doctest::Contains(":3"), std::runtime_error);
    }
    SUBCASE("wrong header") {
        std::ofstream(path) << "t,process\n";
        CHECK_THROWS_AS(io::read_events_csv(path, 10.0, std::nullopt, no_jitter()),
                        std::runtime_error);
    }
}

TEST_CASE("tied coordinates are jittered with a warning") {
    TempDir dir;
    auto path = dir.path / "ties.csv";
    std::ofstream(path) << "process,t,x,y\n1,1.0,,\n1,1.0,,\n1,2.5,,\n";
    io::IngestReport report;
    io::JitterConfig jitter;  // defaults: enabled, U(0, 1/120)
    auto pattern = io::read_events_csv(path, 10.0, std::nullopt, jitter, &report);
    CHECK(report.jittered_times == 2);
    CHECK(report.warnings.size() == 1);
    REQUIRE(pattern.size() == 3);
    CHECK(pattern.events[0].t != pattern.events[1].t);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(pattern.events[i].t >= 1.0);
        CHECK(pattern.events[i].t <= 1.0 + 1.0 / 120.0);
    }
    SUBCASE("with jitter disabled the ties are fatal") {
        CHECK_THROWS_AS(io::read_events_csv(path, 10.0, std::nullopt, no_jitter()),
                        std::invalid_argument);
    }
}

TEST_CASE("branching CSV uses per-process indices") {
    TempDir dir;
    auto pattern = EventPattern::create(
        {{1, 0.5, std::nullopt}, {0, 1.0, std::nullopt}, {1, 1.5, std::nullopt}}, 5.0,
        std::nullopt);
    BranchingStructure b{{kImmigrant, 0, 1}};
    auto path = dir.path / "branching.csv";
    io::write_branching_csv(path, pattern, b);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "child_process,child_index,parent_process,parent_index");
    std::getline(in, line);
    CHECK(line == "2,0,-1,-1");
    std::getline(in, line);
    CHECK(line == "1,0,2,0");
    std::getline(in, line);
    CHECK(line == "2,1,1,0");
}

TEST_CASE("counts CSV and BinSpec JSON round trip") {
    TempDir dir;
    Window w{0.0, 0.0, 10.0, 10.0};
    Rng rng(12);
    auto pattern = testutil::random_pattern(rng, 60, 2, true, 20.0);
    // widen to the io window
    std::vector<Event> ev = pattern.events;
    for (auto& e : ev) e.s = rng.uniform_in(w);
    pattern = EventPattern::create(ev, 20.0, w);

    BinSpec spec;
    spec.horizon = 20.0;
    spec.window = w;
    spec.per_process = {{1.5, 2.0}, {2.0, std::nullopt}};
    auto counts = aggregate(pattern, spec);

    io::write_counts_csv(dir.path / "counts.csv", counts);
    io::write_binspec_json(dir.path / "binspec.json", spec);
    auto back = io::read_counts_csv(dir.path / "counts.csv", dir.path / "binspec.json");
    CHECK(back.counts == counts.counts);
    CHECK(back.spec.horizon == spec.horizon);

    SUBCASE("counts outside the BinSpec dimensions fail") {
        std::ofstream(dir.path / "bad.csv")
            << "process,bin_t,bin_x,bin_y,count\n1,99,0,0,1\n";
        CHECK_THROWS_WITH_AS(
            io::read_counts_csv(dir.path / "bad.csv", dir.path / "binspec.json"),
            doctest::Contains("dimensions"), std::runtime_error);
    }
}

TEST_CASE("posterior CSV round trip") {
    TempDir dir;
    mcmc::PosteriorSamples s;
    s.param_names = {"mu", "alpha"};
    s.draws = {{0.1, 0.5, 0.2, 0.6}, {0.3, 0.7, 0.4, 0.8}};
    s.iterations = {{10, 20}, {10, 20}};
    s.snapshots.resize(2);
    s.chain_seconds = {0.0, 0.0};
    io::write_posterior_csv(dir.path / "posterior.csv", s);
    auto back = io::read_posterior_csv(dir.path / "posterior.csv");
    CHECK(back.param_names == s.param_names);
    CHECK(back.draws == s.draws);
    CHECK(back.iterations == s.iterations);
}

TEST_CASE("fit config parsing is strict") {
    TempDir dir;
    auto path = dir.path / "config.json";
    SUBCASE("round trip") {
        io::FitConfig cfg;
        cfg.kernel_family = TemporalFamily::Lomax;
        cfg.priors.rate_rate = 1.0;
        cfg.sampler.iterations = 123;
        cfg.sampler.strategy = mcmc::LatentStrategy::ByCluster;
        io::write_fit_config(path, cfg);
        auto back = io::read_fit_config(path);
        CHECK(back.kernel_family == TemporalFamily::Lomax);
        CHECK(back.priors.rate_rate == 1.0);
        CHECK(back.sampler.iterations == 123);
        CHECK(back.sampler.strategy == mcmc::LatentStrategy::ByCluster);
    }
    SUBCASE("unknown keys are errors") {
        std::ofstream(path) << R"({"schema_version":1,"kernel":"exponential","typo_key":1})";
        CHECK_THROWS_WITH_AS(io::read_fit_config(path), doctest::Contains("typo_key"),
                             std::runtime_error);
    }
    SUBCASE("unknown sampler keys are errors") {
        std::ofstream(path)
            << R"({"schema_version":1,"sampler":{"iterations":100,"iters":100}})";
        CHECK_THROWS_WITH_AS(io::read_fit_config(path), doctest::Contains("iters"),
                             std::runtime_error);
    }
}

TEST_CASE("snapshots round trip and params_from_values inversion") {
    TempDir dir;
    SUBCASE("snapshot files") {
        SimulationRequest req;
        req.params = ModelParams::univariate(0.5, 0.4, TemporalKernel::exponential(1.2),
                                             SpatialKernel(0.8));
        req.t_end = 30.0;
        req.window = Window{0.0, 0.0, 10.0, 10.0};
        req.seed = 6;
        auto pattern = clip_to_window(simulate(req).pattern);

        mcmc::PosteriorSamples s;
        s.snapshots.resize(2);
        s.snapshots[0].push_back({req.params, pattern});
        s.snapshots[1].push_back({req.params, pattern});
        io::write_snapshots(dir.path, s, TemporalFamily::Exponential, 30.0, req.window);
        auto back = io::read_snapshots(dir.path);
        REQUIRE(back.size() == 2);
        REQUIRE(back[0].size() == 1);
        CHECK(back[0][0].pattern.size() == pattern.size());
        CHECK(back[0][0].params.mu[0] == 0.5);
        CHECK(back[0][0].params.temporal(0, 0).beta() == 1.2);
        CHECK((*back[0][0].params.spatial)(0, 0).gamma() == 0.8);
    }
    SUBCASE("params_from_values inverts param_values") {
        Rng rng(77);
        for (auto family : {TemporalFamily::Exponential, TemporalFamily::Lomax}) {
            auto params = testutil::random_params(rng, 2, true, family);
            auto names = mcmc::param_names(params, family);
            auto values = mcmc::param_values(params, family);
            std::map<std::string, double> map;
            for (size_t i = 0; i < names.size(); ++i) map[names[i]] = values[i];
            auto back = io::params_from_values(2, family, true, map);
            CHECK(back.mu == params.mu);
            CHECK(back.alpha == params.alpha);
            for (int m = 0; m < 2; ++m)
                for (int l = 0; l < 2; ++l) {
                    CHECK(back.temporal(m, l) == params.temporal(m, l));
                    CHECK((*back.spatial)(m, l) == (*params.spatial)(m, l));
                }
        }
    }
}
