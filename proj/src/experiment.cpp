#include "agghawkes/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "agghawkes/diagnostics.hpp"
#include "agghawkes/io.hpp"
#include "agghawkes/simulate.hpp"

namespace hawkes::experiment {

namespace {

using nlohmann::json;

constexpr uint64_t kSimStream = 0x73696dULL;
constexpr uint64_t kFitStream = 0x666974ULL;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

double broadcast(const std::vector<double>& v, int l) {
    return v.size() == 1 ? v[0] : v.at(l);
}

}  // namespace

std::string AggregationSpec::label() const {
    std::ostringstream os;
    os << "dt=";
    for (size_t i = 0; i < dt.size(); ++i) os << (i ? "/" : "") << fmt(dt[i]);
    if (ds) {
        os << ",ds=";
        for (size_t i = 0; i < ds->size(); ++i) os << (i ? "/" : "") << fmt((*ds)[i]);
    }
    if (drop_spatial) os << ",temporal-fit";
    return os.str();
}

void ExperimentConfig::validate() const {
    require(replicates >= 1, "replicates must be >= 1");
    require(horizon > 0.0, "horizon must be positive");
    require(!models.empty(), "at least one model required");
    require(!aggregations.empty(), "at least one aggregation required");
    for (const auto& m : models) {
        m.validate();
        require(m.is_spatial() == window.has_value(),
                "spatial models need a window, temporal models must not have one");
        for (int i = 0; i < m.L; ++i)
            for (int j = 0; j < m.L; ++j)
                require(m.temporal(i, j).family() == family, "kernel family mismatch");
    }
    for (const auto& agg : aggregations) {
        require(!agg.dt.empty(), "aggregation needs dt");
        if (agg.drop_spatial) require(window.has_value(), "drop_spatial needs a spatial model");
        if (agg.ds) {
            require(window.has_value(), "ds given for a temporal model");
            require(!agg.drop_spatial, "ds and drop_spatial are mutually exclusive");
        }
    }
}

std::vector<ProcessBins> resolve_bins(const ExperimentConfig& config, const ModelParams& truth,
                                      const AggregationSpec& agg) {
    std::vector<ProcessBins> bins(truth.L);
    for (int l = 0; l < truth.L; ++l) {
        double t_scale = config.relative_units ? truth.temporal(l, l).mean() : 1.0;
        require(std::isfinite(t_scale), "relative units need a finite kernel mean");
        bins[l].dt = broadcast(agg.dt, l) * t_scale;
        if (agg.ds && !agg.drop_spatial) {
            double s_scale = config.relative_units ? (*truth.spatial)(l, l).gamma() : 1.0;
            bins[l].ds = broadcast(*agg.ds, l) * s_scale;
        } else if (config.window && !agg.drop_spatial) {
            bins[l].ds = 0.0;  // spatial data, exact locations
        }
    }
    return bins;
}

EventPattern simulate_dataset(const ExperimentConfig& config, int model_idx, int replicate) {
    SimulationRequest req;
    req.params = config.models[model_idx];
    req.t_start = 0.0;
    req.t_end = config.horizon;
    req.window = config.window;
    req.seed = Rng(config.seed)
                   .derive(kSimStream, static_cast<uint64_t>(model_idx),
                           static_cast<uint64_t>(replicate))
                   .seed();
    return simulate(req).pattern;
}

FitRecord run_single_fit(const ExperimentConfig& config, int model_idx, int agg_idx,
                         int replicate, const EventPattern& dataset) {
    const ModelParams& truth = config.models[model_idx];
    const AggregationSpec& agg = config.aggregations[agg_idx];

    FitRecord rec;
    rec.model = model_idx;
    rec.aggregation = agg_idx;
    rec.replicate = replicate;

    mcmc::SamplerConfig sampler = config.sampler;
    sampler.kernel_family = config.family;
    sampler.seed = Rng(config.seed)
                       .derive(kFitStream, static_cast<uint64_t>(model_idx),
                               static_cast<uint64_t>(agg_idx), static_cast<uint64_t>(replicate))
                       .seed();

    // observed data per the aggregation: counts for binned axes, boxes with
    // exact coordinates otherwise
    EventPattern data = dataset;
    ModelParams truth_for_fit = truth;
    if (agg.drop_spatial) {
        data = drop_locations(dataset);
        truth_for_fit.spatial.reset();
    }
    std::vector<ProcessBins> bins = resolve_bins(config, truth, agg);
    bool any_spatial_binning = false;
    for (const auto& pb : bins)
        if (pb.ds && *pb.ds > 0.0) any_spatial_binning = true;
    if (any_spatial_binning) data = clip_to_window(data);

    BinSpec spec;
    spec.per_process = bins;
    spec.horizon = config.horizon;
    spec.window = data.window;
    mcmc::ObservedData observed = mcmc::ObservedData::from_pattern(data, spec);
    rec.event_count = static_cast<int64_t>(observed.slots.size());

    mcmc::PosteriorSamples samples = mcmc::run_sampler(observed, config.priors, sampler, 1);
    auto summary = summarize(samples);

    std::map<std::string, double> truths;
    {
        auto names = mcmc::param_names(truth_for_fit, config.family);
        auto values = mcmc::param_values(truth_for_fit, config.family);
        for (size_t i = 0; i < names.size(); ++i) truths[names[i]] = values[i];
    }
    for (const auto& [name, s] : summary) {
        ParamResult pr;
        pr.post_mean = s.mean;
        pr.q025 = s.q025;
        pr.q975 = s.q975;
        pr.ci_length = s.ci_length;
        pr.rhat = s.rhat;
        pr.ess = s.ess;
        pr.truth = truths.count(name) ? truths[name] : std::numeric_limits<double>::quiet_NaN();
        pr.covered = pr.truth >= s.q025 && pr.truth <= s.q975;
        rec.params[name] = pr;
    }
    for (double sec : samples.chain_seconds) rec.runtime_seconds += sec;
    return rec;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    auto t0 = std::chrono::steady_clock::now();

    ExperimentReport report;
    report.config = config;

    struct Task {
        int model, replicate;
    };
    std::vector<Task> tasks;
    for (int m = 0; m < static_cast<int>(config.models.size()); ++m)
        for (int r = 0; r < config.replicates; ++r) tasks.push_back({m, r});

    const size_t per_task = config.aggregations.size();
    std::vector<FitRecord> fits(tasks.size() * per_task);

    int jobs = config.jobs > 0 ? config.jobs
                               : static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
    std::atomic<size_t> next{0};
    auto worker = [&] {
        while (true) {
            size_t k = next.fetch_add(1);
            if (k >= tasks.size()) return;
            const Task& task = tasks[k];
            EventPattern dataset;
            bool sim_ok = true;
            std::string sim_error;
            try {
                dataset = simulate_dataset(config, task.model, task.replicate);
            } catch (const std::exception& ex) {
                sim_ok = false;
                sim_error = ex.what();
            }
            for (size_t a = 0; a < per_task; ++a) {
                FitRecord& rec = fits[k * per_task + a];
                rec.model = task.model;
                rec.aggregation = static_cast<int>(a);
                rec.replicate = task.replicate;
                if (!sim_ok) {
                    rec.status = "simulation failed: " + sim_error;
                    continue;
                }
                try {
                    rec = run_single_fit(config, task.model, static_cast<int>(a),
                                         task.replicate, dataset);
                } catch (const std::exception& ex) {
                    rec.status = std::string("fit failed: ") + ex.what();
                }
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    report.fits = std::move(fits);

    for (const auto& rec : report.fits)
        if (rec.status != "ok")
            report.failures.push_back("model " + std::to_string(rec.model) + " aggregation " +
                                      std::to_string(rec.aggregation) + " replicate " +
                                      std::to_string(rec.replicate) + ": " + rec.status);

    // summary rows: averages across successful replicates
    for (int m = 0; m < static_cast<int>(config.models.size()); ++m)
        for (size_t a = 0; a < per_task; ++a) {
            std::map<std::string, std::vector<const ParamResult*>> by_param;
            double seconds = 0.0;
            int ok = 0;
            for (const auto& rec : report.fits) {
                if (rec.model != m || rec.aggregation != static_cast<int>(a) ||
                    rec.status != "ok")
                    continue;
                ++ok;
                seconds += rec.runtime_seconds;
                for (const auto& [name, pr] : rec.params) by_param[name].push_back(&pr);
            }
            for (const auto& [name, results] : by_param) {
                SummaryRow row;
                row.model = m;
                row.aggregation = static_cast<int>(a);
                row.param = name;
                row.replicates_ok = ok;
                double ess_total = 0.0;
                for (const ParamResult* pr : results) {
                    row.estimate += pr->post_mean;
                    row.ci_length += pr->ci_length;
                    row.coverage += pr->covered ? 1.0 : 0.0;
                    row.mean_rhat += pr->rhat;
                    ess_total += pr->ess;
                }
                size_t n = results.size();
                if (n > 0) {
                    row.estimate /= n;
                    row.ci_length /= n;
                    row.coverage /= n;
                    row.mean_rhat /= n;
                }
                row.ess_per_second = seconds > 0.0 ? ess_total / seconds : 0.0;
                report.summary.push_back(row);
            }
        }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

// --- report files -------------------------------------------------------------

namespace {

std::string csv_fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json window_json(const std::optional<Window>& w) {
    if (!w) return nullptr;
    return json{{"x0", w->x0}, {"y0", w->y0}, {"x1", w->x1}, {"y1", w->y1}};
}

}  // namespace

void write_report(const std::filesystem::path& dir, const ExperimentReport& report) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "fits.csv");
        out << "model,aggregation,label,replicate,status,events,runtime_s,param,post_mean,"
               "q2.5,q97.5,ci_length,rhat,ess,truth,covered\n";
        for (const auto& rec : report.fits) {
            const std::string label = report.config.aggregations[rec.aggregation].label();
            if (rec.status != "ok") {
                out << rec.model << ',' << rec.aggregation << ',' << label << ','
                    << rec.replicate << ",\"" << rec.status << "\",,,,,,,,,,,\n";
                continue;
            }
            for (const auto& [name, pr] : rec.params)
                out << rec.model << ',' << rec.aggregation << ',' << label << ','
                    << rec.replicate << ",ok," << rec.event_count << ','
                    << csv_fmt(rec.runtime_seconds) << ',' << name << ','
                    << csv_fmt(pr.post_mean) << ',' << csv_fmt(pr.q025) << ','
                    << csv_fmt(pr.q975) << ',' << csv_fmt(pr.ci_length) << ','
                    << csv_fmt(pr.rhat) << ',' << csv_fmt(pr.ess) << ',' << csv_fmt(pr.truth)
                    << ',' << (pr.covered ? 1 : 0) << '\n';
        }
    }
    {
        std::ofstream out(dir / "summary.csv");
        out << "model,aggregation,label,param,estimate,ci_length,coverage,mean_rhat,"
               "ess_per_second,replicates_ok\n";
        for (const auto& row : report.summary)
            out << row.model << ',' << row.aggregation << ','
                << report.config.aggregations[row.aggregation].label() << ',' << row.param << ','
                << csv_fmt(row.estimate) << ',' << csv_fmt(row.ci_length) << ','
                << csv_fmt(row.coverage) << ',' << csv_fmt(row.mean_rhat) << ','
                << csv_fmt(row.ess_per_second) << ',' << row.replicates_ok << '\n';
    }
    {
        json manifest;
        manifest["schema_version"] = 1;
        manifest["name"] = report.config.name;
        manifest["seed"] = report.config.seed;
        manifest["replicates"] = report.config.replicates;
        manifest["horizon"] = report.config.horizon;
        manifest["window"] = window_json(report.config.window);
        manifest["kernel"] =
            report.config.family == TemporalFamily::Exponential ? "exponential" : "lomax";
        manifest["aggregations"] = json::array();
        for (const auto& agg : report.config.aggregations)
            manifest["aggregations"].push_back(agg.label());
        manifest["models"] = static_cast<int>(report.config.models.size());
        manifest["sampler"] = {{"iterations", report.config.sampler.iterations},
                               {"burnin", report.config.sampler.burnin},
                               {"thin", report.config.sampler.thin},
                               {"chains", report.config.sampler.chains}};
        manifest["wall_seconds"] = report.wall_seconds;
        manifest["failures"] = report.failures;
        manifest["version"] = "agghawkes 0.1.0";
        std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
    }
}

namespace {

void check_keys_json(const json& obj, std::initializer_list<const char*> allowed,
                     const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw std::runtime_error("unknown key '" + it.key() + "' in " + where);
    }
}

PairMatrix<double> matrix_from_json(const json& j, int L, const std::string& what) {
    PairMatrix<double> m(L);
    if (!j.is_array() || static_cast<int>(j.size()) != L)
        throw std::runtime_error(what + " must be an LxL array");
    for (int a = 0; a < L; ++a) {
        if (!j[a].is_array() || static_cast<int>(j[a].size()) != L)
            throw std::runtime_error(what + " must be an LxL array");
        for (int b = 0; b < L; ++b) m(a, b) = j[a][b].get<double>();
    }
    return m;
}

}  // namespace

namespace {

ModelParams model_from_json(const json& mj, TemporalFamily family, const std::string& where) {
    check_keys_json(mj, {"schema_version", "kernel", "mu", "alpha", "beta", "c", "p", "gamma"},
                    where);
    ModelParams params;
    params.mu = mj.at("mu").get<std::vector<double>>();
    params.L = static_cast<int>(params.mu.size());
    params.alpha = matrix_from_json(mj.at("alpha"), params.L, "alpha");
    params.temporal = PairMatrix<TemporalKernel>(params.L, TemporalKernel::exponential(1.0));
    if (family == TemporalFamily::Exponential) {
        PairMatrix<double> beta = matrix_from_json(mj.at("beta"), params.L, "beta");
        for (int a = 0; a < params.L; ++a)
            for (int b = 0; b < params.L; ++b)
                params.temporal(a, b) = TemporalKernel::exponential(beta(a, b));
    } else {
        PairMatrix<double> c = matrix_from_json(mj.at("c"), params.L, "c");
        PairMatrix<double> p = matrix_from_json(mj.at("p"), params.L, "p");
        for (int a = 0; a < params.L; ++a)
            for (int b = 0; b < params.L; ++b)
                params.temporal(a, b) = TemporalKernel::lomax(c(a, b), p(a, b));
    }
    if (mj.contains("gamma")) {
        PairMatrix<double> g = matrix_from_json(mj.at("gamma"), params.L, "gamma");
        params.spatial = PairMatrix<SpatialKernel>(params.L, SpatialKernel(1.0));
        for (int a = 0; a < params.L; ++a)
            for (int b = 0; b < params.L; ++b) (*params.spatial)(a, b) = SpatialKernel(g(a, b));
    }
    return params;
}

}  // namespace

ModelParams read_model_json(const std::filesystem::path& path, TemporalFamily& family) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    json j = json::parse(in);
    std::string kernel = j.value("kernel", "exponential");
    if (kernel == "exponential") family = TemporalFamily::Exponential;
    else if (kernel == "lomax") family = TemporalFamily::Lomax;
    else throw std::runtime_error(path.string() + ": unknown kernel '" + kernel + "'");
    return model_from_json(j, family, path.string());
}

ExperimentConfig read_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    json j = json::parse(in);
    check_keys_json(j,
                    {"schema_version", "name", "seed", "replicates", "horizon", "window",
                     "kernel", "models", "aggregation_units", "aggregations", "priors",
                     "sampler", "jobs"},
                    path.string());
    if (j.at("schema_version").get<int>() != 1)
        throw std::runtime_error(path.string() + ": unsupported schema_version");

    ExperimentConfig cfg;
    cfg.name = j.value("name", cfg.name);
    cfg.seed = j.value("seed", uint64_t{0});
    cfg.replicates = j.at("replicates").get<int>();
    cfg.horizon = j.at("horizon").get<double>();
    if (j.contains("window") && !j.at("window").is_null()) {
        const json& w = j.at("window");
        check_keys_json(w, {"x0", "y0", "x1", "y1"}, "window");
        cfg.window = Window{w.at("x0").get<double>(), w.at("y0").get<double>(),
                            w.at("x1").get<double>(), w.at("y1").get<double>()};
    }
    std::string kernel = j.value("kernel", "exponential");
    if (kernel == "exponential") cfg.family = TemporalFamily::Exponential;
    else if (kernel == "lomax") cfg.family = TemporalFamily::Lomax;
    else throw std::runtime_error("unknown kernel '" + kernel + "'");

    for (const json& mj : j.at("models"))
        cfg.models.push_back(model_from_json(mj, cfg.family, "models[]"));

    cfg.relative_units = j.value("aggregation_units", std::string("relative")) == "relative";
    for (const json& aj : j.at("aggregations")) {
        check_keys_json(aj, {"dt", "ds", "drop_spatial"}, "aggregations[]");
        AggregationSpec agg;
        if (aj.at("dt").is_array()) agg.dt = aj.at("dt").get<std::vector<double>>();
        else agg.dt = {aj.at("dt").get<double>()};
        if (aj.contains("ds") && !aj.at("ds").is_null()) {
            if (aj.at("ds").is_array()) agg.ds = aj.at("ds").get<std::vector<double>>();
            else agg.ds = std::vector<double>{aj.at("ds").get<double>()};
        }
        agg.drop_spatial = aj.value("drop_spatial", false);
        cfg.aggregations.push_back(std::move(agg));
    }

    // priors and sampler share the fit-config schema
    if (j.contains("priors") || j.contains("sampler")) {
        json sub;
        sub["schema_version"] = 1;
        sub["kernel"] = kernel;
        if (j.contains("priors")) sub["priors"] = j["priors"];
        if (j.contains("sampler")) sub["sampler"] = j["sampler"];
        io::FitConfig fc = io::parse_fit_config_json(sub.dump(), path.string());
        cfg.priors = fc.priors;
        cfg.sampler = fc.sampler;
    }
    cfg.sampler.kernel_family = cfg.family;
    cfg.jobs = j.value("jobs", 0);
    cfg.validate();
    return cfg;
}

}  // namespace hawkes::experiment
