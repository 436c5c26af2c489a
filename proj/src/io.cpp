#include "agghawkes/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "agghawkes/rng.hpp"

namespace hawkes::io {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    return in;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

[[noreturn]] void fail_line(const std::filesystem::path& path, size_t line_no,
                            const std::string& what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

double parse_double(const std::string& s, const std::filesystem::path& path, size_t line_no) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail_line(path, line_no, "not a number: '" + s + "'");
    }
}

long parse_long(const std::string& s, const std::filesystem::path& path, size_t line_no) {
    try {
        size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        fail_line(path, line_no, "not an integer: '" + s + "'");
    }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw std::runtime_error("unknown key '" + it.key() + "' in " + where);
    }
}

json window_to_json(const Window& w) {
    return json{{"x0", w.x0}, {"y0", w.y0}, {"x1", w.x1}, {"y1", w.y1}};
}

Window window_from_json(const json& j, const std::string& where) {
    check_keys(j, {"x0", "y0", "x1", "y1"}, where);
    return {j.at("x0").get<double>(), j.at("y0").get<double>(), j.at("x1").get<double>(),
            j.at("y1").get<double>()};
}

}  // namespace

// --- events ------------------------------------------------------------------

void write_events_csv(const std::filesystem::path& path, const EventPattern& pattern) {
    auto out = open_out(path);
    out << "process,t,x,y\n";
    for (const auto& e : pattern.events) {
        out << (e.process + 1) << ',' << fmt(e.t) << ',';
        if (e.s) out << fmt(e.s->x) << ',' << fmt(e.s->y);
        else out << ',';
        out << '\n';
    }
}

EventPattern read_events_csv(const std::filesystem::path& path, double horizon,
                             std::optional<Window> window, const JitterConfig& jitter,
                             IngestReport* report) {
    auto in = open_in(path);
    std::string line;
    size_t line_no = 0;
    if (!std::getline(in, line)) fail_line(path, 1, "empty file");
    ++line_no;
    if (split_csv(line) != std::vector<std::string>{"process", "t", "x", "y"})
        fail_line(path, line_no, "expected header 'process,t,x,y'");

    std::vector<Event> events;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 4) fail_line(path, line_no, "expected 4 fields");
        Event e;
        long proc = parse_long(f[0], path, line_no);
        if (proc < 1) fail_line(path, line_no, "process ids are 1-based");
        e.process = static_cast<int>(proc - 1);
        e.t = parse_double(f[1], path, line_no);
        if (e.t < 0.0 || e.t >= horizon)
            fail_line(path, line_no, "event time " + fmt(e.t) + " outside [0, " + fmt(horizon) + ")");
        bool has_x = !f[2].empty(), has_y = !f[3].empty();
        if (has_x != has_y) fail_line(path, line_no, "x and y must both be present or both empty");
        if (window.has_value() != has_x)
            fail_line(path, line_no, window ? "missing location for spatial data"
                                            : "location given but no window configured");
        if (has_x) e.s = Vec2{parse_double(f[2], path, line_no), parse_double(f[3], path, line_no)};
        events.push_back(e);
    }

    // jitter exactly tied coordinates (per process), as data in whole-unit
    // resolution otherwise violate the strict ordering the model assumes
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    Rng rng(jitter.seed);
    auto tie_groups = [&](auto key, auto apply) {
        std::map<std::pair<int, std::string>, std::vector<size_t>> groups;
        for (size_t i = 0; i < events.size(); ++i)
            groups[{events[i].process, key(events[i])}].push_back(i);
        for (auto& [k, idx] : groups)
            if (idx.size() > 1)
                for (size_t i : idx) apply(events[i]);
    };
    if (jitter.enabled) {
        int64_t before = rep.jittered_times;
        tie_groups([](const Event& e) { return fmt(e.t); },
                   [&](Event& e) {
                       double v;
                       do {
                           v = e.t + rng.uniform(0.0, jitter.time_width);
                       } while (v >= horizon);
                       e.t = v;
                       ++rep.jittered_times;
                   });
        if (window) {
            tie_groups([](const Event& e) { return fmt(e.s->x) + "|" + fmt(e.s->y); },
                       [&](Event& e) {
                           e.s->x += rng.uniform(0.0, jitter.space_width);
                           e.s->y += rng.uniform(0.0, jitter.space_width);
                           ++rep.jittered_locations;
                       });
        }
        if (rep.jittered_times > before || rep.jittered_locations > 0)
            rep.warnings.push_back("tied coordinates in " + path.string() +
                                   " were jittered (times: " + std::to_string(rep.jittered_times) +
                                   ", locations: " + std::to_string(rep.jittered_locations) + ")");
    }
    return EventPattern::create(std::move(events), horizon, window);
}

void write_branching_csv(const std::filesystem::path& path, const EventPattern& pattern,
                         const BranchingStructure& branching) {
    branching.validate(pattern);
    // position of each event within its process's time-ordered list
    std::vector<int> local_index(pattern.size());
    std::vector<int> counter(pattern.process_count(), 0);
    for (size_t i = 0; i < pattern.size(); ++i)
        local_index[i] = counter[pattern.events[i].process]++;

    auto out = open_out(path);
    out << "child_process,child_index,parent_process,parent_index\n";
    for (size_t i = 0; i < pattern.size(); ++i) {
        out << (pattern.events[i].process + 1) << ',' << local_index[i] << ',';
        int p = branching.parent[i];
        if (p == kImmigrant) out << "-1,-1";
        else out << (pattern.events[p].process + 1) << ',' << local_index[p];
        out << '\n';
    }
}

// --- counts -------------------------------------------------------------------

void write_counts_csv(const std::filesystem::path& path, const AggregatedCounts& counts) {
    auto out = open_out(path);
    out << "process,bin_t,bin_x,bin_y,count\n";
    const BinSpec& spec = counts.spec;
    for (int l = 0; l < spec.process_count(); ++l) {
        const bool cells = spec.per_process[l].ds.has_value();
        const int nb = spec.time_bin_count(l), nx = spec.cell_count_x(l),
                  ny = spec.cell_count_y(l);
        for (int b = 0; b < nb; ++b)
            for (int cx = 0; cx < nx; ++cx)
                for (int cy = 0; cy < ny; ++cy) {
                    int64_t k = counts.at(l, b, cx, cy);
                    if (k == 0) continue;
                    out << (l + 1) << ',' << b << ',';
                    if (cells) out << cx << ',' << cy;
                    else out << ',';
                    out << ',' << k << '\n';
                }
    }
}

void write_binspec_json(const std::filesystem::path& path, const BinSpec& spec) {
    json j;
    j["schema_version"] = 1;
    j["horizon"] = spec.horizon;
    j["window"] = spec.window ? window_to_json(*spec.window) : json(nullptr);
    j["processes"] = json::array();
    for (const auto& pb : spec.per_process) {
        json p;
        p["dt"] = pb.dt;
        p["ds"] = pb.ds ? json(*pb.ds) : json(nullptr);
        j["processes"].push_back(p);
    }
    open_out(path) << j.dump(2) << '\n';
}

BinSpec read_binspec_json(const std::filesystem::path& path) {
    json j = json::parse(open_in(path));
    check_keys(j, {"schema_version", "horizon", "window", "processes"}, path.string());
    if (j.at("schema_version").get<int>() != 1)
        throw std::runtime_error(path.string() + ": unsupported schema_version");
    BinSpec spec;
    spec.horizon = j.at("horizon").get<double>();
    if (!j.at("window").is_null()) spec.window = window_from_json(j.at("window"), path.string());
    for (const auto& p : j.at("processes")) {
        check_keys(p, {"dt", "ds"}, path.string() + " processes[]");
        ProcessBins pb;
        pb.dt = p.at("dt").get<double>();
        if (!p.at("ds").is_null()) pb.ds = p.at("ds").get<double>();
        spec.per_process.push_back(pb);
    }
    spec.validate();
    return spec;
}

AggregatedCounts read_counts_csv(const std::filesystem::path& csv_path,
                                 const std::filesystem::path& binspec_path) {
    BinSpec spec = read_binspec_json(binspec_path);
    AggregatedCounts counts;
    counts.spec = spec;
    counts.counts.resize(spec.process_count());
    for (int l = 0; l < spec.process_count(); ++l) {
        size_t sz = static_cast<size_t>(spec.time_bin_count(l)) * spec.cell_count_x(l) *
                    spec.cell_count_y(l);
        counts.counts[l].assign(sz, 0);
    }

    auto in = open_in(csv_path);
    std::string line;
    size_t line_no = 0;
    std::getline(in, line);
    ++line_no;
    if (split_csv(line) != std::vector<std::string>{"process", "bin_t", "bin_x", "bin_y", "count"})
        fail_line(csv_path, line_no, "expected header 'process,bin_t,bin_x,bin_y,count'");
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 5) fail_line(csv_path, line_no, "expected 5 fields");
        long proc = parse_long(f[0], csv_path, line_no);
        if (proc < 1 || proc > spec.process_count())
            fail_line(csv_path, line_no, "process id outside the BinSpec");
        int l = static_cast<int>(proc - 1);
        long b = parse_long(f[1], csv_path, line_no);
        if (b < 0 || b >= spec.time_bin_count(l))
            fail_line(csv_path, line_no, "bin_t outside the BinSpec dimensions");
        bool cells = spec.per_process[l].ds.has_value();
        long cx = 0, cy = 0;
        if (cells) {
            if (f[2].empty() || f[3].empty())
                fail_line(csv_path, line_no, "bin_x/bin_y required for spatially binned process");
            cx = parse_long(f[2], csv_path, line_no);
            cy = parse_long(f[3], csv_path, line_no);
            if (cx < 0 || cx >= spec.cell_count_x(l) || cy < 0 || cy >= spec.cell_count_y(l))
                fail_line(csv_path, line_no, "bin_x/bin_y outside the BinSpec dimensions");
        } else if (!f[2].empty() || !f[3].empty()) {
            fail_line(csv_path, line_no, "bin_x/bin_y given for a temporal process");
        }
        long k = parse_long(f[4], csv_path, line_no);
        if (k < 0) fail_line(csv_path, line_no, "negative count");
        counts.at(l, static_cast<int>(b), static_cast<int>(cx), static_cast<int>(cy)) += k;
    }
    return counts;
}

// --- posterior ----------------------------------------------------------------

void write_posterior_csv(const std::filesystem::path& path,
                         const mcmc::PosteriorSamples& samples) {
    auto out = open_out(path);
    out << "chain,iteration,param,value\n";
    for (int ch = 0; ch < samples.chain_count(); ++ch)
        for (size_t r = 0; r < samples.rows(ch); ++r)
            for (size_t c = 0; c < samples.param_names.size(); ++c)
                out << ch << ',' << samples.iterations[ch][r] << ',' << samples.param_names[c]
                    << ',' << fmt(samples.value(ch, r, c)) << '\n';
}

mcmc::PosteriorSamples read_posterior_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::string line;
    size_t line_no = 0;
    std::getline(in, line);
    ++line_no;
    if (split_csv(line) != std::vector<std::string>{"chain", "iteration", "param", "value"})
        fail_line(path, line_no, "expected header 'chain,iteration,param,value'");

    mcmc::PosteriorSamples out;
    std::map<std::string, size_t> col_of;
    // value store per chain, per column, in row order
    std::vector<std::vector<std::vector<double>>> cols;
    std::vector<std::vector<int>> iters;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto f = split_csv(line);
        if (f.size() != 4) fail_line(path, line_no, "expected 4 fields");
        long ch = parse_long(f[0], path, line_no);
        if (ch < 0) fail_line(path, line_no, "negative chain id");
        long iter = parse_long(f[1], path, line_no);
        auto [it, fresh] = col_of.try_emplace(f[2], col_of.size());
        if (fresh) out.param_names.push_back(f[2]);
        size_t col = it->second;
        if (static_cast<size_t>(ch) >= cols.size()) {
            cols.resize(ch + 1);
            iters.resize(ch + 1);
        }
        if (cols[ch].size() < col_of.size()) cols[ch].resize(col_of.size());
        cols[ch][col].push_back(parse_double(f[3], path, line_no));
        if (col == 0) iters[ch].push_back(static_cast<int>(iter));
    }
    for (size_t ch = 0; ch < cols.size(); ++ch) {
        cols[ch].resize(out.param_names.size());
        size_t rows = cols[ch].empty() ? 0 : cols[ch][0].size();
        for (const auto& c : cols[ch])
            if (c.size() != rows)
                throw std::runtime_error(path.string() + ": ragged draws across parameters");
        std::vector<double> flat;
        flat.reserve(rows * out.param_names.size());
        for (size_t r = 0; r < rows; ++r)
            for (size_t c = 0; c < out.param_names.size(); ++c) flat.push_back(cols[ch][c][r]);
        out.draws.push_back(std::move(flat));
        out.iterations.push_back(std::move(iters[ch]));
        out.snapshots.emplace_back();
        out.chain_seconds.push_back(0.0);
    }
    return out;
}

void write_summary_json(const std::filesystem::path& path,
                        const std::map<std::string, ParamSummary>& summary,
                        const mcmc::PosteriorSamples& samples,
                        const mcmc::SamplerConfig& config) {
    auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["schema_version"] = 1;
    j["params"] = json::object();
    for (const auto& [name, s] : summary) {
        j["params"][name] = {{"mean", num(s.mean)},     {"sd", num(s.sd)},
                             {"q2.5", num(s.q025)},     {"q50", num(s.q50)},
                             {"q97.5", num(s.q975)},    {"ci_length", num(s.ci_length)},
                             {"rhat", num(s.rhat)},     {"ess", num(s.ess)}};
    }
    auto move_rates = [&](const mcmc::MoveStats& ms) {
        return json{{"proposed", ms.proposed},
                    {"accepted", ms.accepted},
                    {"skipped", ms.skipped},
                    {"rate", num(ms.rate())}};
    };
    j["acceptance_rates"] = {{"rate_mh", move_rates(samples.acceptance.rate_mh)},
                             {"latent_time", move_rates(samples.acceptance.latent_time)},
                             {"latent_location", move_rates(samples.acceptance.latent_location)},
                             {"cluster_block", move_rates(samples.acceptance.cluster_block)}};
    j["chains"] = samples.chain_count();
    j["iterations"] = config.iterations;
    j["burnin"] = config.burnin;
    j["thin"] = config.thin;
    j["seed"] = config.seed;
    j["strategy"] = config.strategy == mcmc::LatentStrategy::OneAtATime ? "one"
                    : config.strategy == mcmc::LatentStrategy::ByGeneration ? "generation"
                                                                            : "cluster";
    j["chain_seconds"] = samples.chain_seconds;
    open_out(path) << j.dump(2) << '\n';
}

// --- snapshots ------------------------------------------------------------------

void write_snapshots(const std::filesystem::path& dir, const mcmc::PosteriorSamples& samples,
                     TemporalFamily family, double horizon, const std::optional<Window>& window) {
    std::filesystem::create_directories(dir);
    json meta;
    meta["schema_version"] = 1;
    meta["horizon"] = horizon;
    meta["window"] = window ? window_to_json(*window) : json(nullptr);
    meta["kernel"] = family == TemporalFamily::Exponential ? "exponential" : "lomax";
    int L = 1;
    for (const auto& per_chain : samples.snapshots)
        for (const auto& snap : per_chain) L = std::max(L, snap.params.L);
    meta["L"] = L;
    open_out(dir / "snapshots_meta.json") << meta.dump(2) << '\n';

    auto pout = open_out(dir / "snapshots_params.csv");
    pout << "chain,snapshot,param,value\n";
    auto eout = open_out(dir / "snapshots_events.csv");
    eout << "chain,snapshot,process,t,x,y\n";
    for (size_t ch = 0; ch < samples.snapshots.size(); ++ch) {
        for (size_t k = 0; k < samples.snapshots[ch].size(); ++k) {
            const auto& snap = samples.snapshots[ch][k];
            auto names = mcmc::param_names(snap.params, family);
            auto values = mcmc::param_values(snap.params, family);
            for (size_t c = 0; c < names.size(); ++c)
                pout << ch << ',' << k << ',' << names[c] << ',' << fmt(values[c]) << '\n';
            for (const auto& e : snap.pattern.events) {
                eout << ch << ',' << k << ',' << (e.process + 1) << ',' << fmt(e.t) << ',';
                if (e.s) eout << fmt(e.s->x) << ',' << fmt(e.s->y);
                else eout << ',';
                eout << '\n';
            }
        }
    }
}

std::vector<std::vector<mcmc::LatentSnapshot>> read_snapshots(const std::filesystem::path& dir) {
    json meta = json::parse(open_in(dir / "snapshots_meta.json"));
    check_keys(meta, {"schema_version", "horizon", "window", "kernel", "L"},
               (dir / "snapshots_meta.json").string());
    double horizon = meta.at("horizon").get<double>();
    std::optional<Window> window;
    if (!meta.at("window").is_null())
        window = window_from_json(meta.at("window"), "snapshots_meta.json window");
    TemporalFamily family = meta.at("kernel").get<std::string>() == "lomax"
                                ? TemporalFamily::Lomax
                                : TemporalFamily::Exponential;
    int L = meta.at("L").get<int>();

    // params
    std::map<std::pair<long, long>, std::map<std::string, double>> params_by_snap;
    {
        auto path = dir / "snapshots_params.csv";
        auto in = open_in(path);
        std::string line;
        size_t line_no = 1;
        std::getline(in, line);
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto f = split_csv(line);
            if (f.size() != 4) fail_line(path, line_no, "expected 4 fields");
            params_by_snap[{parse_long(f[0], path, line_no), parse_long(f[1], path, line_no)}]
                         [f[2]] = parse_double(f[3], path, line_no);
        }
    }
    // events
    std::map<std::pair<long, long>, std::vector<Event>> events_by_snap;
    {
        auto path = dir / "snapshots_events.csv";
        auto in = open_in(path);
        std::string line;
        size_t line_no = 1;
        std::getline(in, line);
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto f = split_csv(line);
            if (f.size() != 6) fail_line(path, line_no, "expected 6 fields");
            Event e;
            e.process = static_cast<int>(parse_long(f[2], path, line_no) - 1);
            e.t = parse_double(f[3], path, line_no);
            if (!f[4].empty())
                e.s = Vec2{parse_double(f[4], path, line_no), parse_double(f[5], path, line_no)};
            events_by_snap[{parse_long(f[0], path, line_no), parse_long(f[1], path, line_no)}]
                .push_back(e);
        }
    }

    std::vector<std::vector<mcmc::LatentSnapshot>> out;
    for (auto& [key, values] : params_by_snap) {
        if (static_cast<size_t>(key.first) >= out.size()) out.resize(key.first + 1);
        mcmc::LatentSnapshot snap;
        snap.params = params_from_values(L, family, window.has_value(), values);
        auto it = events_by_snap.find(key);
        std::vector<Event> events = it == events_by_snap.end() ? std::vector<Event>{}
                                                               : std::move(it->second);
        snap.pattern = EventPattern::create(std::move(events), horizon, window);
        out[key.first].push_back(std::move(snap));
    }
    return out;
}

// --- fit config ------------------------------------------------------------------

FitConfig read_fit_config(const std::filesystem::path& path) {
    std::stringstream buf;
    buf << open_in(path).rdbuf();
    return parse_fit_config_json(buf.str(), path.string());
}

FitConfig parse_fit_config_json(const std::string& text, const std::string& where) {
    const std::string& path = where;  // used in error messages below
    json j = json::parse(text);
    check_keys(j, {"schema_version", "kernel", "priors", "sampler"}, path);
    FitConfig cfg;
    if (j.at("schema_version").get<int>() != 1)
        throw std::runtime_error(path + ": unsupported schema_version");
    std::string kernel = j.value("kernel", "exponential");
    if (kernel == "exponential") cfg.kernel_family = TemporalFamily::Exponential;
    else if (kernel == "lomax") cfg.kernel_family = TemporalFamily::Lomax;
    else throw std::runtime_error(path + ": unknown kernel '" + kernel + "'");

    if (j.contains("priors")) {
        const json& p = j["priors"];
        check_keys(p, {"mu", "alpha", "beta", "gamma_sq", "lomax_c", "lomax_p_minus1"},
                   path + " priors");
        auto pair = [&](const char* key, double& shape, double& rate) {
            if (!p.contains(key)) return;
            const json& v = p.at(key);
            if (!v.is_array() || v.size() != 2)
                throw std::runtime_error(path + ": priors." + key +
                                         " must be [shape, rate]");
            shape = v[0].get<double>();
            rate = v[1].get<double>();
        };
        pair("mu", cfg.priors.mu_shape, cfg.priors.mu_rate);
        pair("alpha", cfg.priors.alpha_shape, cfg.priors.alpha_rate);
        pair("beta", cfg.priors.rate_shape, cfg.priors.rate_rate);
        pair("gamma_sq", cfg.priors.gamma_sq_shape, cfg.priors.gamma_sq_rate);
        pair("lomax_c", cfg.priors.lomax_c_shape, cfg.priors.lomax_c_rate);
        pair("lomax_p_minus1", cfg.priors.lomax_pm1_shape, cfg.priors.lomax_pm1_rate);
    }
    if (j.contains("sampler")) {
        const json& s = j["sampler"];
        check_keys(s,
                   {"iterations", "burnin", "thin", "chains", "seed", "strategy", "sigma_rate",
                    "target_accept", "q_trunc", "record_latent", "snapshot_stride"},
                   path + " sampler");
        cfg.sampler.iterations = s.value("iterations", cfg.sampler.iterations);
        cfg.sampler.burnin = s.value("burnin", cfg.sampler.burnin);
        cfg.sampler.thin = s.value("thin", cfg.sampler.thin);
        cfg.sampler.chains = s.value("chains", cfg.sampler.chains);
        cfg.sampler.seed = s.value("seed", cfg.sampler.seed);
        cfg.sampler.sigma_rate = s.value("sigma_rate", cfg.sampler.sigma_rate);
        cfg.sampler.target_accept = s.value("target_accept", cfg.sampler.target_accept);
        cfg.sampler.q_trunc = s.value("q_trunc", cfg.sampler.q_trunc);
        cfg.sampler.record_latent = s.value("record_latent", cfg.sampler.record_latent);
        cfg.sampler.snapshot_stride = s.value("snapshot_stride", cfg.sampler.snapshot_stride);
        if (s.contains("strategy")) {
            std::string st = s.at("strategy").get<std::string>();
            if (st == "one") cfg.sampler.strategy = mcmc::LatentStrategy::OneAtATime;
            else if (st == "generation") cfg.sampler.strategy = mcmc::LatentStrategy::ByGeneration;
            else if (st == "cluster") cfg.sampler.strategy = mcmc::LatentStrategy::ByCluster;
            else throw std::runtime_error(path + ": unknown strategy '" + st + "'");
        }
    }
    cfg.sampler.kernel_family = cfg.kernel_family;
    return cfg;
}

void write_fit_config(const std::filesystem::path& path, const FitConfig& cfg) {
    json j;
    j["schema_version"] = 1;
    j["kernel"] = cfg.kernel_family == TemporalFamily::Exponential ? "exponential" : "lomax";
    j["priors"] = {
        {"mu", {cfg.priors.mu_shape, cfg.priors.mu_rate}},
        {"alpha", {cfg.priors.alpha_shape, cfg.priors.alpha_rate}},
        {"beta", {cfg.priors.rate_shape, cfg.priors.rate_rate}},
        {"gamma_sq", {cfg.priors.gamma_sq_shape, cfg.priors.gamma_sq_rate}},
        {"lomax_c", {cfg.priors.lomax_c_shape, cfg.priors.lomax_c_rate}},
        {"lomax_p_minus1", {cfg.priors.lomax_pm1_shape, cfg.priors.lomax_pm1_rate}},
    };
    j["sampler"] = {
        {"iterations", cfg.sampler.iterations},
        {"burnin", cfg.sampler.burnin},
        {"thin", cfg.sampler.thin},
        {"chains", cfg.sampler.chains},
        {"seed", cfg.sampler.seed},
        {"strategy", cfg.sampler.strategy == mcmc::LatentStrategy::OneAtATime ? "one"
                     : cfg.sampler.strategy == mcmc::LatentStrategy::ByGeneration ? "generation"
                                                                                  : "cluster"},
        {"sigma_rate", cfg.sampler.sigma_rate},
        {"target_accept", cfg.sampler.target_accept},
        {"q_trunc", cfg.sampler.q_trunc},
        {"record_latent", cfg.sampler.record_latent},
        {"snapshot_stride", cfg.sampler.snapshot_stride},
    };
    open_out(path) << j.dump(2) << '\n';
}

ModelParams params_from_values(int L, TemporalFamily family, bool spatial,
                               const std::map<std::string, double>& values) {
    auto get = [&](const std::string& name) {
        auto it = values.find(name);
        if (it == values.end())
            throw std::runtime_error("missing parameter value: " + name);
        return it->second;
    };
    auto suffix = [L](int m, int l) {
        return L == 1 ? std::string{} : "_" + std::to_string(m + 1) + "_" + std::to_string(l + 1);
    };
    ModelParams p;
    p.L = L;
    p.mu.resize(L);
    for (int l = 0; l < L; ++l)
        p.mu[l] = get(L == 1 ? "mu" : "mu_" + std::to_string(l + 1));
    p.alpha = PairMatrix<double>(L);
    p.temporal = PairMatrix<TemporalKernel>(L, TemporalKernel::exponential(1.0));
    if (spatial) p.spatial = PairMatrix<SpatialKernel>(L, SpatialKernel(1.0));
    for (int m = 0; m < L; ++m)
        for (int l = 0; l < L; ++l) {
            p.alpha(m, l) = get("alpha" + suffix(m, l));
            if (family == TemporalFamily::Exponential) {
                p.temporal(m, l) = TemporalKernel::exponential(get("beta" + suffix(m, l)));
            } else {
                p.temporal(m, l) =
                    TemporalKernel::lomax(get("c" + suffix(m, l)), get("p" + suffix(m, l)));
            }
            if (spatial) (*p.spatial)(m, l) = SpatialKernel(get("gamma" + suffix(m, l)));
        }
    return p;
}

}  // namespace hawkes::io
