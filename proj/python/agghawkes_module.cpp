// Python bindings for the core operations: kernels, simulation, aggregation,
// posterior sampling, diagnostics, and forecasting.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "agghawkes/aggregate.hpp"
#include "agghawkes/diagnostics.hpp"
#include "agghawkes/forecast.hpp"
#include "agghawkes/kernels.hpp"
#include "agghawkes/mcmc.hpp"
#include "agghawkes/process.hpp"
#include "agghawkes/simulate.hpp"

namespace py = pybind11;
using namespace hawkes;

namespace {

// events as dicts keep the surface simple for smoke use
py::list pattern_to_list(const EventPattern& pattern) {
    py::list events;
    for (const auto& e : pattern.events) {
        py::dict d;
        d["process"] = e.process + 1;
        d["t"] = e.t;
        if (e.s) {
            d["x"] = e.s->x;
            d["y"] = e.s->y;
        }
        events.append(d);
    }
    return events;
}

EventPattern pattern_from_list(const py::list& events, double horizon,
                               std::optional<Window> window) {
    std::vector<Event> out;
    for (const auto& item : events) {
        py::dict d = item.cast<py::dict>();
        Event e;
        e.process = d["process"].cast<int>() - 1;
        e.t = d["t"].cast<double>();
        if (d.contains("x")) e.s = Vec2{d["x"].cast<double>(), d["y"].cast<double>()};
        out.push_back(e);
    }
    return EventPattern::create(std::move(out), horizon, window);
}

ModelParams make_params(const std::vector<double>& mu,
                        const std::vector<std::vector<double>>& alpha, const py::dict& kernel,
                        const std::optional<std::vector<std::vector<double>>>& gamma) {
    const int L = static_cast<int>(mu.size());
    ModelParams p;
    p.L = L;
    p.mu = mu;
    p.alpha = PairMatrix<double>(L);
    for (int m = 0; m < L; ++m)
        for (int l = 0; l < L; ++l) p.alpha(m, l) = alpha.at(m).at(l);
    p.temporal = PairMatrix<TemporalKernel>(L, TemporalKernel::exponential(1.0));
    std::string family = kernel["family"].cast<std::string>();
    for (int m = 0; m < L; ++m)
        for (int l = 0; l < L; ++l) {
            if (family == "exponential") {
                auto beta = kernel["beta"].cast<std::vector<std::vector<double>>>();
                p.temporal(m, l) = TemporalKernel::exponential(beta.at(m).at(l));
            } else if (family == "lomax") {
                auto c = kernel["c"].cast<std::vector<std::vector<double>>>();
                auto shape = kernel["p"].cast<std::vector<std::vector<double>>>();
                p.temporal(m, l) = TemporalKernel::lomax(c.at(m).at(l), shape.at(m).at(l));
            } else {
                throw std::invalid_argument("kernel family must be exponential or lomax");
            }
        }
    if (gamma) {
        p.spatial = PairMatrix<SpatialKernel>(L, SpatialKernel(1.0));
        for (int m = 0; m < L; ++m)
            for (int l = 0; l < L; ++l) (*p.spatial)(m, l) = SpatialKernel(gamma->at(m).at(l));
    }
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bayesian inference for Hawkes processes from aggregated count data";

    py::class_<Window>(m, "Window")
        .def(py::init([](double x0, double y0, double x1, double y1) {
                 return Window{x0, y0, x1, y1};
             }),
             py::arg("x0"), py::arg("y0"), py::arg("x1"), py::arg("y1"))
        .def_readonly("x0", &Window::x0)
        .def_readonly("y0", &Window::y0)
        .def_readonly("x1", &Window::x1)
        .def_readonly("y1", &Window::y1)
        .def("area", &Window::area)
        .def("contains", [](const Window& w, double x, double y) {
            return w.contains({x, y});
        });

    py::class_<TemporalKernel>(m, "TemporalKernel")
        .def_static("exponential", &TemporalKernel::exponential, py::arg("beta"))
        .def_static("lomax", &TemporalKernel::lomax, py::arg("c"), py::arg("p"))
        .def("density", &TemporalKernel::density)
        .def("cdf", &TemporalKernel::cdf)
        .def("quantile", &TemporalKernel::quantile)
        .def("mean", &TemporalKernel::mean)
        .def("median", &TemporalKernel::median);

    py::class_<SpatialKernel>(m, "SpatialKernel")
        .def(py::init<double>(), py::arg("gamma"))
        .def("density", [](const SpatialKernel& k, double dx, double dy) {
            return k.density({dx, dy});
        })
        .def_property_readonly("gamma", &SpatialKernel::gamma);

    m.def(
        "simulate",
        [](const std::vector<double>& mu, const std::vector<std::vector<double>>& alpha,
           const py::dict& kernel, const std::optional<std::vector<std::vector<double>>>& gamma,
           double horizon, std::optional<Window> window, uint64_t seed) {
            SimulationRequest req;
            req.params = make_params(mu, alpha, kernel, gamma);
            req.t_end = horizon;
            req.window = window;
            req.seed = seed;
            SimulationResult result = simulate(req);
            py::dict out;
            out["events"] = pattern_to_list(result.pattern);
            py::list parents;
            for (int p : result.branching.parent) parents.append(p);
            out["parent"] = parents;
            return out;
        },
        py::arg("mu"), py::arg("alpha"), py::arg("kernel"), py::arg("gamma") = std::nullopt,
        py::arg("horizon") = 100.0, py::arg("window") = std::nullopt, py::arg("seed") = 1,
        "Draw one pattern through the cluster representation; returns events and true parents.");

    m.def(
        "aggregate",
        [](const py::list& events, double horizon, std::optional<Window> window, double dt,
           std::optional<double> ds) {
            EventPattern pattern = pattern_from_list(events, horizon, window);
            int L = std::max(pattern.process_count(), 1);
            BinSpec spec = BinSpec::uniform(L, dt, ds, horizon, window);
            AggregatedCounts counts = aggregate(pattern, spec);
            py::list rows;
            for (int l = 0; l < L; ++l)
                for (int b = 0; b < spec.time_bin_count(l); ++b)
                    for (int cx = 0; cx < spec.cell_count_x(l); ++cx)
                        for (int cy = 0; cy < spec.cell_count_y(l); ++cy) {
                            int64_t k = counts.at(l, b, cx, cy);
                            if (k == 0) continue;
                            py::dict row;
                            row["process"] = l + 1;
                            row["bin_t"] = b;
                            if (ds) {
                                row["bin_x"] = cx;
                                row["bin_y"] = cy;
                            }
                            row["count"] = k;
                            rows.append(row);
                        }
            return rows;
        },
        py::arg("events"), py::arg("horizon"), py::arg("window") = std::nullopt, py::arg("dt"),
        py::arg("ds") = std::nullopt, "Bin events into counts (zero bins omitted).");

    m.def(
        "fit",
        [](const py::list& events, double horizon, std::optional<Window> window, double dt,
           std::optional<double> ds, const std::string& kernel, int iterations, int burnin,
           int chains, uint64_t seed, const std::string& strategy, bool record_latent) {
            EventPattern pattern = pattern_from_list(events, horizon, window);
            int L = std::max(pattern.process_count(), 1);
            BinSpec spec = BinSpec::uniform(
                L, dt, window ? std::optional<double>(ds ? *ds : 0.0) : std::nullopt, horizon,
                window);
            mcmc::ObservedData observed = mcmc::ObservedData::from_pattern(pattern, spec);
            mcmc::Priors priors;
            mcmc::SamplerConfig config;
            config.iterations = iterations;
            config.burnin = burnin;
            config.chains = chains;
            config.seed = seed;
            config.kernel_family =
                kernel == "lomax" ? TemporalFamily::Lomax : TemporalFamily::Exponential;
            config.record_latent = record_latent;
            if (strategy == "one") config.strategy = mcmc::LatentStrategy::OneAtATime;
            else if (strategy == "generation") config.strategy = mcmc::LatentStrategy::ByGeneration;
            else if (strategy == "cluster") config.strategy = mcmc::LatentStrategy::ByCluster;
            else throw std::invalid_argument("strategy must be one|generation|cluster");

            mcmc::PosteriorSamples samples = mcmc::run_sampler(observed, priors, config);
            auto summary = summarize(samples);
            py::dict out;
            py::dict stats;
            for (const auto& [name, s] : summary) {
                py::dict d;
                d["mean"] = s.mean;
                d["sd"] = s.sd;
                d["q2.5"] = s.q025;
                d["q50"] = s.q50;
                d["q97.5"] = s.q975;
                d["rhat"] = s.rhat;
                d["ess"] = s.ess;
                stats[name.c_str()] = d;
            }
            out["summary"] = stats;
            py::dict draws;
            for (const auto& name : samples.param_names)
                draws[name.c_str()] = samples.pooled(name);
            out["draws"] = draws;
            return out;
        },
        py::arg("events"), py::arg("horizon"), py::arg("window") = std::nullopt,
        py::arg("dt") = 0.0, py::arg("ds") = std::nullopt, py::arg("kernel") = "exponential",
        py::arg("iterations") = 2000, py::arg("burnin") = 1000, py::arg("chains") = 2,
        py::arg("seed") = 1, py::arg("strategy") = "one", py::arg("record_latent") = false,
        "Posterior sampling from events binned at (dt, ds); dt=0 keeps exact times.");

    m.def("rhat", &rhat, py::arg("chains"));
    m.def("ess", &ess, py::arg("chain"));
}
