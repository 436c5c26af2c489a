// agghawkes: simulate, aggregate, fit, diagnose, forecast, and run
// reproducible simulation studies for (spatio-temporal, multivariate) Hawkes
// processes observed as exact events or binned counts.
//
// Exit codes: 0 success, 2 validation error, 3 runtime failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "agghawkes/diagnostics.hpp"
#include "agghawkes/experiment.hpp"
#include "agghawkes/forecast.hpp"
#include "agghawkes/io.hpp"
#include "agghawkes/mcmc.hpp"
#include "agghawkes/simulate.hpp"

namespace fs = std::filesystem;
using namespace hawkes;
using nlohmann::json;

namespace {

std::optional<Window> parse_window(const std::string& text) {
    if (text.empty()) return std::nullopt;
    std::istringstream in(text);
    Window w;
    char c1, c2, c3;
    if (!(in >> w.x0 >> c1 >> w.y0 >> c2 >> w.x1 >> c3 >> w.y1) || c1 != ',' || c2 != ',' ||
        c3 != ',')
        throw std::invalid_argument("window must be 'x0,y0,x1,y1'");
    require(w.area() > 0.0, "window must have positive area");
    return w;
}

struct MetaInfo {
    double horizon = 0.0;
    std::optional<Window> window;
};

MetaInfo read_meta(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    json j = json::parse(in);
    MetaInfo meta;
    meta.horizon = j.at("horizon").get<double>();
    if (j.contains("window") && !j.at("window").is_null()) {
        const json& w = j.at("window");
        meta.window = Window{w.at("x0").get<double>(), w.at("y0").get<double>(),
                             w.at("x1").get<double>(), w.at("y1").get<double>()};
    }
    return meta;
}

void write_meta(const fs::path& path, double horizon, const std::optional<Window>& window,
                const json& extra) {
    json j = extra;
    j["schema_version"] = 1;
    j["horizon"] = horizon;
    j["window"] = window ? json{{"x0", window->x0},
                                {"y0", window->y0},
                                {"x1", window->x1},
                                {"y1", window->y1}}
                         : json(nullptr);
    std::ofstream(path) << j.dump(2) << '\n';
}

EventPattern load_events(const fs::path& events_path, double horizon,
                         std::optional<Window> window, const io::JitterConfig& jitter) {
    io::IngestReport report;
    EventPattern pattern = io::read_events_csv(events_path, horizon, window, jitter, &report);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    return pattern;
}

mcmc::LatentStrategy parse_strategy(const std::string& s) {
    if (s == "one") return mcmc::LatentStrategy::OneAtATime;
    if (s == "generation") return mcmc::LatentStrategy::ByGeneration;
    if (s == "cluster") return mcmc::LatentStrategy::ByCluster;
    throw std::invalid_argument("strategy must be one|generation|cluster");
}

struct NamedRegion {
    std::string name;
    Window box;
};

std::vector<NamedRegion> read_regions_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "region,x0,y0,x1,y1" && line != "region,x0,y0,x1,y1\r")
        throw std::runtime_error(path.string() + ": expected header 'region,x0,y0,x1,y1'");
    std::vector<NamedRegion> regions;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        NamedRegion r;
        char c;
        if (!std::getline(ls, r.name, ',') ||
            !(ls >> r.box.x0 >> c >> r.box.y0 >> c >> r.box.x1 >> c >> r.box.y1))
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": malformed region row");
        regions.push_back(r);
    }
    return regions;
}

std::pair<double, double> parse_time_window(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("time window must be 'lo:hi'");
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hawkes processes from aggregated (binned) or exact event data"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "draw a pattern from a Hawkes model");
    struct {
        std::string model_path;
        double mu = 0.3, alpha = 0.7, beta = 1.0, gamma = 0.0;
        double lomax_c = 0.0, lomax_p = 0.0;
        double horizon = 100.0, t_start = 0.0;
        std::string window;
        uint64_t seed = 1;
        std::string out = "sim_out";
    } sim_opt;
    sim->add_option("--model", sim_opt.model_path, "model JSON (multivariate / full control)");
    sim->add_option("--mu", sim_opt.mu, "background rate (univariate shortcut)");
    sim->add_option("--alpha", sim_opt.alpha, "branching ratio");
    sim->add_option("--beta", sim_opt.beta, "exponential kernel rate");
    sim->add_option("--lomax-c", sim_opt.lomax_c, "Lomax scale (selects the Lomax kernel)");
    sim->add_option("--lomax-p", sim_opt.lomax_p, "Lomax shape");
    sim->add_option("--gamma", sim_opt.gamma, "spatial bandwidth (needs --window)");
    sim->add_option("--horizon", sim_opt.horizon, "end of the observation window");
    sim->add_option("--t-start", sim_opt.t_start, "start of the observation window");
    sim->add_option("--window", sim_opt.window, "spatial window x0,y0,x1,y1");
    sim->add_option("--seed", sim_opt.seed, "simulation seed");
    sim->add_option("--out", sim_opt.out, "output directory");

    // ---- aggregate ----
    auto* agg = app.add_subcommand("aggregate", "bin an event pattern into counts");
    struct {
        std::string events, meta, window;
        double horizon = 0.0;
        std::vector<double> dt, ds;
        bool clip = false;
        bool no_jitter = false;
        double jitter_dt = 1.0 / 120.0, jitter_ds = 5e-6;
        uint64_t jitter_seed = 0;
        std::string out = "agg_out";
    } agg_opt;
    agg->add_option("--events", agg_opt.events, "event CSV")->required();
    agg->add_option("--meta", agg_opt.meta, "meta JSON carrying horizon/window");
    agg->add_option("--horizon", agg_opt.horizon, "horizon (if no --meta)");
    agg->add_option("--window", agg_opt.window, "spatial window x0,y0,x1,y1 (if no --meta)");
    agg->add_option("--dt", agg_opt.dt, "time bin length, one value or one per process")
        ->required();
    agg->add_option("--ds", agg_opt.ds, "spatial cell side, one value or one per process");
    agg->add_flag("--clip-window", agg_opt.clip,
                  "drop events outside the window instead of failing");
    agg->add_flag("--no-jitter", agg_opt.no_jitter, "fail on tied coordinates");
    agg->add_option("--jitter-dt", agg_opt.jitter_dt, "tie-break jitter width for times");
    agg->add_option("--jitter-ds", agg_opt.jitter_ds, "tie-break jitter width for locations");
    agg->add_option("--jitter-seed", agg_opt.jitter_seed, "jitter seed");
    agg->add_option("--out", agg_opt.out, "output directory");

    // ---- fit ----
    auto* fit = app.add_subcommand("fit", "posterior sampling from counts or events");
    struct {
        std::string counts, binspec, events, meta, window, config;
        double horizon = 0.0;
        int chains = 2, iters = 4000, burnin = 2000, thin = 1;
        uint64_t seed = 1;
        std::string strategy;
        bool drop_spatial = false;
        bool snapshots = false;
        int jobs = 0;
        bool no_jitter = false;
        std::string out = "fit_out";
    } fit_opt;
    fit->add_option("--counts", fit_opt.counts, "counts CSV (aggregated data)");
    fit->add_option("--binspec", fit_opt.binspec, "BinSpec JSON");
    fit->add_option("--events", fit_opt.events, "event CSV (exact or mixed data)");
    fit->add_option("--meta", fit_opt.meta, "meta JSON for --events");
    fit->add_option("--horizon", fit_opt.horizon, "horizon for --events");
    fit->add_option("--window", fit_opt.window, "window for --events");
    fit->add_option("--config", fit_opt.config, "fit config JSON (priors, kernel, sampler)");
    fit->add_option("--chains", fit_opt.chains, "number of chains");
    fit->add_option("--iters", fit_opt.iters, "iterations per chain");
    fit->add_option("--burnin", fit_opt.burnin, "burn-in iterations");
    fit->add_option("--thin", fit_opt.thin, "thinning");
    fit->add_option("--seed", fit_opt.seed, "sampler seed");
    fit->add_option("--strategy", fit_opt.strategy, "latent update: one|generation|cluster");
    fit->add_flag("--drop-spatial", fit_opt.drop_spatial,
                  "fit the temporal model, ignoring locations");
    fit->add_flag("--snapshots", fit_opt.snapshots, "record latent snapshots for forecasting");
    fit->add_option("--jobs", fit_opt.jobs, "parallel chains");
    fit->add_flag("--no-jitter", fit_opt.no_jitter, "fail on tied coordinates");
    fit->add_option("--out", fit_opt.out, "output directory");

    // ---- diagnose ----
    auto* diag = app.add_subcommand("diagnose", "convergence summaries for a posterior CSV");
    struct {
        std::string posterior;
        bool split = false;
        std::string out = "summary.json";
    } diag_opt;
    diag->add_option("--posterior", diag_opt.posterior, "posterior CSV")->required();
    diag->add_flag("--split-rhat", diag_opt.split, "use split-half Rhat");
    diag->add_option("--out", diag_opt.out, "summary JSON path");

    // ---- forecast ----
    auto* fc = app.add_subcommand("forecast", "posterior-predictive forecasts");
    struct {
        std::string posterior;
        double horizon = 7.0;
        int draws = 1;
        std::string regions;
        std::vector<std::string> windows;
        uint64_t seed = 1;
        std::string out = "forecast_out";
    } fc_opt;
    fc->add_option("--posterior", fc_opt.posterior, "fit output directory with snapshots")
        ->required();
    fc->add_option("--horizon", fc_opt.horizon, "forecast horizon h");
    fc->add_option("--draws", fc_opt.draws, "forward draws per stored snapshot");
    fc->add_option("--regions", fc_opt.regions, "regions CSV: region,x0,y0,x1,y1");
    fc->add_option("--window", fc_opt.windows,
                   "time sub-window 'lo:hi' relative to the data horizon (repeatable)");
    fc->add_option("--seed", fc_opt.seed, "forecast seed");
    fc->add_option("--out", fc_opt.out, "output directory");

    // ---- experiment ----
    auto* exp = app.add_subcommand("experiment", "simulate-aggregate-fit study harness");
    struct {
        std::string config;
        std::string out = "experiment_out";
        int jobs = 0;
        int64_t seed = -1;
    } exp_opt;
    exp->add_option("--config", exp_opt.config, "experiment config JSON")->required();
    exp->add_option("--out", exp_opt.out, "output directory");
    exp->add_option("--jobs", exp_opt.jobs, "worker pool size");
    exp->add_option("--seed", exp_opt.seed, "root seed override");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            TemporalFamily family = TemporalFamily::Exponential;
            ModelParams params;
            std::optional<Window> window = parse_window(sim_opt.window);
            if (!sim_opt.model_path.empty()) {
                params = experiment::read_model_json(sim_opt.model_path, family);
            } else {
                TemporalKernel kern =
                    sim_opt.lomax_c > 0.0 ? TemporalKernel::lomax(sim_opt.lomax_c, sim_opt.lomax_p)
                                          : TemporalKernel::exponential(sim_opt.beta);
                family = kern.family();
                std::optional<SpatialKernel> spatial;
                if (sim_opt.gamma > 0.0) spatial = SpatialKernel(sim_opt.gamma);
                params = ModelParams::univariate(sim_opt.mu, sim_opt.alpha, kern, spatial);
            }
            require(params.is_spatial() == window.has_value(),
                    "spatial model and --window must go together");
            SimulationRequest req;
            req.params = params;
            req.t_start = sim_opt.t_start;
            req.t_end = sim_opt.horizon;
            req.window = window;
            req.seed = sim_opt.seed;
            SimulationResult result = simulate(req);
            fs::create_directories(sim_opt.out);
            io::write_events_csv(fs::path(sim_opt.out) / "events.csv", result.pattern);
            io::write_branching_csv(fs::path(sim_opt.out) / "branching.csv", result.pattern,
                                    result.branching);
            write_meta(fs::path(sim_opt.out) / "meta.json", sim_opt.horizon, window,
                       json{{"seed", sim_opt.seed},
                            {"events", result.pattern.size()},
                            {"kernel", family == TemporalFamily::Exponential ? "exponential"
                                                                             : "lomax"}});
            std::cerr << "simulated " << result.pattern.size() << " events -> " << sim_opt.out
                      << '\n';

        } else if (*agg) {
            MetaInfo meta;
            if (!agg_opt.meta.empty()) {
                meta = read_meta(agg_opt.meta);
            } else {
                require(agg_opt.horizon > 0.0, "--horizon (or --meta) is required");
                meta.horizon = agg_opt.horizon;
                meta.window = parse_window(agg_opt.window);
            }
            io::JitterConfig jitter;
            jitter.enabled = !agg_opt.no_jitter;
            jitter.time_width = agg_opt.jitter_dt;
            jitter.space_width = agg_opt.jitter_ds;
            jitter.seed = agg_opt.jitter_seed;
            EventPattern pattern =
                load_events(agg_opt.events, meta.horizon, meta.window, jitter);
            if (agg_opt.clip) pattern = clip_to_window(pattern);

            int L = std::max(pattern.process_count(), 1);
            BinSpec spec;
            spec.horizon = meta.horizon;
            spec.window = meta.window;
            spec.per_process.resize(L);
            for (int l = 0; l < L; ++l) {
                spec.per_process[l].dt =
                    agg_opt.dt.size() == 1 ? agg_opt.dt[0] : agg_opt.dt.at(l);
                if (!agg_opt.ds.empty())
                    spec.per_process[l].ds =
                        agg_opt.ds.size() == 1 ? agg_opt.ds[0] : agg_opt.ds.at(l);
            }
            AggregatedCounts counts = aggregate(pattern, spec);
            fs::create_directories(agg_opt.out);
            io::write_counts_csv(fs::path(agg_opt.out) / "counts.csv", counts);
            io::write_binspec_json(fs::path(agg_opt.out) / "binspec.json", spec);
            std::cerr << "aggregated " << counts.total() << " events -> " << agg_opt.out << '\n';

        } else if (*fit) {
            io::FitConfig config;
            if (!fit_opt.config.empty()) config = io::read_fit_config(fit_opt.config);
            mcmc::SamplerConfig& sampler = config.sampler;
            if (fit->count("--chains")) sampler.chains = fit_opt.chains;
            if (fit->count("--iters")) sampler.iterations = fit_opt.iters;
            if (fit->count("--burnin")) sampler.burnin = fit_opt.burnin;
            if (fit->count("--thin")) sampler.thin = fit_opt.thin;
            if (fit->count("--seed") || fit_opt.config.empty()) sampler.seed = fit_opt.seed;
            if (!fit_opt.strategy.empty()) sampler.strategy = parse_strategy(fit_opt.strategy);
            if (fit_opt.snapshots) sampler.record_latent = true;
            sampler.kernel_family = config.kernel_family;

            mcmc::ObservedData observed;
            if (!fit_opt.counts.empty()) {
                require(!fit_opt.binspec.empty(), "--counts requires --binspec");
                require(fit_opt.events.empty(), "--counts and --events are exclusive");
                AggregatedCounts counts =
                    io::read_counts_csv(fit_opt.counts, fit_opt.binspec);
                observed = mcmc::ObservedData::from_counts(counts);
            } else {
                require(!fit_opt.events.empty(), "either --counts or --events is required");
                MetaInfo meta;
                if (!fit_opt.meta.empty()) {
                    meta = read_meta(fit_opt.meta);
                } else {
                    require(fit_opt.horizon > 0.0, "--horizon (or --meta) is required");
                    meta.horizon = fit_opt.horizon;
                    meta.window = parse_window(fit_opt.window);
                }
                io::JitterConfig jitter;
                jitter.enabled = !fit_opt.no_jitter;
                EventPattern pattern =
                    load_events(fit_opt.events, meta.horizon, meta.window, jitter);
                if (fit_opt.drop_spatial) pattern = drop_locations(pattern);
                if (!fit_opt.binspec.empty()) {
                    BinSpec spec = io::read_binspec_json(fit_opt.binspec);
                    observed = mcmc::ObservedData::from_pattern(pattern, spec);
                } else {
                    observed = mcmc::ObservedData::from_exact(pattern);
                }
            }

            std::cerr << "fitting " << observed.slots.size() << " events, "
                      << sampler.chains << " chains x " << sampler.iterations
                      << " iterations\n";
            mcmc::PosteriorSamples samples =
                mcmc::run_sampler(observed, config.priors, sampler, fit_opt.jobs);
            auto summary = summarize(samples);

            fs::create_directories(fit_opt.out);
            io::write_posterior_csv(fs::path(fit_opt.out) / "posterior.csv", samples);
            io::write_summary_json(fs::path(fit_opt.out) / "summary.json", summary, samples,
                                   sampler);
            if (sampler.record_latent)
                io::write_snapshots(fit_opt.out, samples, config.kernel_family,
                                    observed.horizon, observed.window);
            for (const auto& [name, s] : summary)
                std::cerr << "  " << name << ": mean " << fmt(s.mean) << "  95% CI ["
                          << fmt(s.q025) << ", " << fmt(s.q975) << "]  rhat "
                          << fmt(s.rhat) << '\n';
            std::cerr << "posterior -> " << fit_opt.out << '\n';

        } else if (*diag) {
            mcmc::PosteriorSamples samples = io::read_posterior_csv(diag_opt.posterior);
            auto summary = summarize(samples, diag_opt.split);
            mcmc::SamplerConfig echo;
            echo.chains = samples.chain_count();
            io::write_summary_json(diag_opt.out, summary, samples, echo);
            std::cout << "param,mean,sd,q2.5,q50,q97.5,rhat,ess\n";
            for (const auto& [name, s] : summary)
                std::cout << name << ',' << fmt(s.mean) << ',' << fmt(s.sd) << ','
                          << fmt(s.q025) << ',' << fmt(s.q50) << ',' << fmt(s.q975) << ','
                          << fmt(s.rhat) << ',' << fmt(s.ess) << '\n';

        } else if (*fc) {
            auto snapshots = io::read_snapshots(fc_opt.posterior);
            MetaInfo meta;
            {
                std::ifstream in(fs::path(fc_opt.posterior) / "snapshots_meta.json");
                if (!in)
                    throw std::invalid_argument(
                        "no snapshots in " + fc_opt.posterior +
                        "; re-fit with --snapshots to enable forecasting");
                json j = json::parse(in);
                meta.horizon = j.at("horizon").get<double>();
                if (!j.at("window").is_null())
                    meta.window = Window{j["window"]["x0"].get<double>(),
                                         j["window"]["y0"].get<double>(),
                                         j["window"]["x1"].get<double>(),
                                         j["window"]["y1"].get<double>()};
            }
            mcmc::PosteriorSamples posterior;
            posterior.snapshots = std::move(snapshots);
            PredictiveRequest req;
            req.horizon = fc_opt.horizon;
            req.draws_per_snapshot = fc_opt.draws;
            req.seed = fc_opt.seed;
            std::vector<EventPattern> forecasts =
                posterior_predictive(posterior, meta.horizon, req);
            std::cerr << "drew " << forecasts.size() << " forecasts over (" << meta.horizon
                      << ", " << meta.horizon + fc_opt.horizon << "]\n";

            fs::create_directories(fc_opt.out);
            {
                std::ofstream out(fs::path(fc_opt.out) / "forecasts.csv");
                out << "draw,process,t,x,y\n";
                for (size_t d = 0; d < forecasts.size(); ++d)
                    for (const auto& e : forecasts[d].events) {
                        out << d << ',' << (e.process + 1) << ',' << fmt(e.t) << ',';
                        if (e.s) out << fmt(e.s->x) << ',' << fmt(e.s->y);
                        else out << ',';
                        out << '\n';
                    }
            }
            std::vector<std::pair<double, double>> windows;
            if (fc_opt.windows.empty()) {
                windows.emplace_back(0.0, fc_opt.horizon);
            } else {
                for (const auto& w : fc_opt.windows) windows.push_back(parse_time_window(w));
            }
            std::vector<NamedRegion> regions;
            if (!fc_opt.regions.empty()) regions = read_regions_csv(fc_opt.regions);

            std::ofstream out(fs::path(fc_opt.out) / "region_counts.csv");
            out << "region,window,mean,q2.5,q50,q97.5\n";
            for (const auto& [lo, hi] : windows) {
                std::string wlabel = fmt(lo) + ":" + fmt(hi);
                CountSummary total = count_in(forecasts, std::nullopt, meta.horizon + lo,
                                              meta.horizon + hi);
                out << "all," << wlabel << ',' << fmt(total.mean) << ',' << fmt(total.q025)
                    << ',' << fmt(total.q50) << ',' << fmt(total.q975) << '\n';
                for (const auto& r : regions) {
                    CountSummary cs =
                        count_in(forecasts, r.box, meta.horizon + lo, meta.horizon + hi);
                    out << r.name << ',' << wlabel << ',' << fmt(cs.mean) << ',' << fmt(cs.q025)
                        << ',' << fmt(cs.q50) << ',' << fmt(cs.q975) << '\n';
                }
            }
            std::cerr << "forecast summaries -> " << fc_opt.out << '\n';

        } else if (*exp) {
            experiment::ExperimentConfig config =
                experiment::read_experiment_config(exp_opt.config);
            if (exp_opt.jobs > 0) config.jobs = exp_opt.jobs;
            if (exp_opt.seed >= 0) config.seed = static_cast<uint64_t>(exp_opt.seed);
            std::cerr << "running experiment '" << config.name << "': "
                      << config.models.size() << " model(s) x "
                      << config.aggregations.size() << " aggregation(s) x "
                      << config.replicates << " replicate(s)\n";
            experiment::ExperimentReport report = experiment::run_experiment(config);
            experiment::write_report(exp_opt.out, report);
            for (const auto& f : report.failures) std::cerr << "failure: " << f << '\n';
            std::cerr << "report -> " << exp_opt.out << " (" << fmt(report.wall_seconds)
                      << " s, " << report.failures.size() << " failures)\n";
        }
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 3;
    }
    return 0;
}
