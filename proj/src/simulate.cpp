#include "agghawkes/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hawkes {

namespace detail {

int64_t sample_offspring_count(double alpha, const TemporalKernel& kernel, double lo,
                               double hi, Rng& rng) {
    double mass = kernel.cdf_between(lo, hi);
    return rng.poisson(alpha * mass);
}

}  // namespace detail

namespace {

SimulationResult run_cluster_simulation(const ModelParams& params, double t_start,
                                        double t_end, const std::optional<Window>& window,
                                        const EventPattern* history, Rng& rng) {
    params.validate();
    require(t_start < t_end, "simulation horizon must be nonempty");
    const bool spatial = params.is_spatial();
    require(!spatial || window.has_value(), "spatial model requires a window");
    if (history) {
        require(history->spatial() == spatial, "history spatiality mismatch");
        for (const auto& e : history->events)
            require(e.t < t_start, "history events must precede t_start");
    }

    const double span = t_end - t_start;

    std::vector<Event> events;
    std::vector<int> parents;
    std::vector<size_t> queue;  // generation-ordered work queue

    auto push_event = [&](int process, double t, Vec2 s, int parent) {
        Event e;
        e.process = process;
        e.t = t;
        if (spatial) e.s = s;
        events.push_back(e);
        parents.push_back(parent);
        queue.push_back(events.size() - 1);
    };

    // generation 0: immigrants, homogeneous Poisson per process
    for (int l = 0; l < params.L; ++l) {
        int64_t n = rng.poisson(params.mu[l] * span);
        for (int64_t k = 0; k < n; ++k) {
            double t = rng.uniform(t_start, t_end);
            Vec2 s = spatial ? rng.uniform_in(*window) : Vec2{};
            push_event(l, t, s, kImmigrant);
        }
    }
    // residual offspring of the history: lags restricted to land in the horizon
    if (history) {
        for (const auto& h : history->events) {
            for (int l = 0; l < params.L; ++l) {
                const TemporalKernel& kernel = params.temporal(h.process, l);
                double lo = t_start - h.t;
                double hi = t_end - h.t;
                int64_t n = detail::sample_offspring_count(params.alpha(h.process, l), kernel,
                                                           lo, hi, rng);
                for (int64_t k = 0; k < n; ++k) {
                    double t = h.t + kernel.sample_truncated(lo, hi, rng);
                    Vec2 s{};
                    if (spatial) s = *h.s + (*params.spatial)(h.process, l).sample(rng);
                    push_event(l, t, s, kImmigrant);
                }
            }
        }
    }

    // later generations, breadth first
    for (size_t q = 0; q < queue.size(); ++q) {
        size_t idx = queue[q];
        const int m = events[idx].process;
        const double t0 = events[idx].t;
        const Vec2 s0 = spatial ? *events[idx].s : Vec2{};
        for (int l = 0; l < params.L; ++l) {
            const TemporalKernel& kernel = params.temporal(m, l);
            double hi = t_end - t0;
            if (hi <= 0.0) continue;
            int64_t n = detail::sample_offspring_count(params.alpha(m, l), kernel, 0.0, hi, rng);
            for (int64_t k = 0; k < n; ++k) {
                double t = t0 + kernel.sample_truncated(0.0, hi, rng);
                Vec2 s{};
                if (spatial) s = s0 + (*params.spatial)(m, l).sample(rng);
                push_event(l, t, s, static_cast<int>(idx));
            }
        }
    }

    // sort by time, remapping parent pointers through the permutation
    std::vector<size_t> order(events.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return events[a].t < events[b].t; });
    std::vector<int> rank(events.size());
    for (size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);

    std::vector<Event> sorted_events(events.size());
    std::vector<int> sorted_parents(events.size());
    for (size_t r = 0; r < order.size(); ++r) {
        sorted_events[r] = events[order[r]];
        int p = parents[order[r]];
        sorted_parents[r] = (p == kImmigrant) ? kImmigrant : rank[p];
    }

    SimulationResult out;
    out.pattern.events = std::move(sorted_events);
    out.pattern.horizon = t_end;
    out.pattern.window = spatial ? window : std::nullopt;
    out.branching.parent = std::move(sorted_parents);
    return out;
}

}  // namespace

SimulationResult simulate(const SimulationRequest& request) {
    Rng rng(request.seed);
    const EventPattern* history = request.history ? &*request.history : nullptr;
    return run_cluster_simulation(request.params, request.t_start, request.t_end,
                                  request.window, history, rng);
}

EventPattern simulate_forward(const ModelParams& params, const EventPattern& history,
                              double t_horizon, double h, Rng& rng) {
    require(h >= 0.0, "forecast horizon must be nonnegative");
    EventPattern out;
    out.horizon = t_horizon + h;
    out.window = history.window;
    if (h == 0.0) return out;
    out.events = run_cluster_simulation(params, t_horizon, t_horizon + h, history.window,
                                        &history, rng)
                     .pattern.events;
    return out;
}

}  // namespace hawkes
