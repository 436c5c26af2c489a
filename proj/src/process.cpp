#include "agghawkes/process.hpp"

#include <algorithm>
#include <cmath>

namespace hawkes {

int EventPattern::process_count() const {
    int L = 0;
    for (const auto& e : events) L = std::max(L, e.process + 1);
    return L;
}

EventPattern EventPattern::create(std::vector<Event> events, double horizon,
                                  std::optional<Window> window) {
    require(horizon > 0.0, "horizon must be positive");
    if (window) require(window->area() > 0.0, "window must have positive area");
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    std::vector<double> last_t;
    for (const auto& e : events) {
        require(e.process >= 0, "event with negative process index");
        require(e.t >= 0.0 && e.t < horizon, "event time outside [0, horizon)");
        require(e.s.has_value() == window.has_value(),
                "locations must be present exactly when a window is set");
        if (static_cast<size_t>(e.process) >= last_t.size())
            last_t.resize(e.process + 1, -1.0);
        require(e.t > last_t[e.process],
                "tied event times within a process; jitter the input first");
        last_t[e.process] = e.t;
    }
    return {std::move(events), horizon, window};
}

void BranchingStructure::validate(const EventPattern& pattern) const {
    require(parent.size() == pattern.size(), "branching size mismatch");
    for (size_t i = 0; i < parent.size(); ++i) {
        int p = parent[i];
        if (p == kImmigrant) continue;
        require(p >= 0 && static_cast<size_t>(p) < pattern.size(), "parent index out of range");
        require(pattern.events[p].t < pattern.events[i].t, "parent at or after child");
    }
}

bool ModelParams::validate() const {
    require(L >= 1, "L must be >= 1");
    require(static_cast<int>(mu.size()) == L, "mu size mismatch");
    require(alpha.dim() == L && temporal.dim() == L, "matrix dimension mismatch");
    if (spatial) require(spatial->dim() == L, "spatial matrix dimension mismatch");
    for (double m : mu) require(m >= 0.0, "mu must be nonnegative");
    double row_max = 0.0;
    for (int m = 0; m < L; ++m) {
        double row = 0.0;
        for (int l = 0; l < L; ++l) {
            require(alpha(m, l) > 0.0 && alpha(m, l) < 1.0, "alpha entries must lie in (0,1)");
            row += alpha(m, l);
        }
        row_max = std::max(row_max, row);
    }
    // row-sum bound on the spectral radius; advisory only
    return row_max < 1.0;
}

ModelParams ModelParams::univariate(double mu, double alpha, TemporalKernel kernel,
                                    std::optional<SpatialKernel> spatial) {
    ModelParams p;
    p.L = 1;
    p.mu = {mu};
    p.alpha = PairMatrix<double>(1, alpha);
    p.temporal = PairMatrix<TemporalKernel>(1, kernel);
    if (spatial) p.spatial = PairMatrix<SpatialKernel>(1, *spatial);
    return p;
}

double conditional_intensity(const ModelParams& params, const EventPattern& pattern,
                             int process, double t, std::optional<Vec2> s) {
    require(t >= 0.0 && t < pattern.horizon, "evaluation time outside [0, horizon)");
    require(process >= 0 && process < params.L, "process index out of range");
    require(s.has_value() == params.is_spatial(), "location argument and model spatiality disagree");

    long double rate = params.mu[process];
    if (params.is_spatial()) {
        rate *= pattern.window->contains(*s) ? 1.0 / pattern.window->area() : 0.0;
    }
    for (const auto& e : pattern.events) {
        if (e.t >= t) break;
        int m = e.process;
        long double g = params.alpha(m, process) * params.temporal(m, process).density(t - e.t);
        if (params.is_spatial()) g *= (*params.spatial)(m, process).density(*s - *e.s);
        rate += g;
    }
    return static_cast<double>(rate);
}

double joint_loglik(const EventPattern& pattern, const BranchingStructure& branching,
                    const ModelParams& params) {
    branching.validate(pattern);
    const double T = pattern.horizon;
    const bool spatial = params.is_spatial();
    require(spatial == pattern.spatial(), "pattern spatiality and model spatiality disagree");

    long double ll = 0.0;
    for (int l = 0; l < params.L; ++l) ll -= params.mu[l] * T;

    const double log_inv_area = spatial ? -std::log(pattern.window->area()) : 0.0;
    for (size_t i = 0; i < pattern.size(); ++i) {
        const Event& e = pattern.events[i];
        require(e.process < params.L, "pattern references a process beyond params.L");
        // compensator of this event's offspring processes
        for (int l = 0; l < params.L; ++l)
            ll -= params.alpha(e.process, l) * params.temporal(e.process, l).cdf(T - e.t);
        int p = branching.parent[i];
        if (p == kImmigrant) {
            ll += std::log(params.mu[e.process]);
            if (spatial) {
                require(pattern.window->contains(*e.s),
                        "immigrant located outside the window has zero density");
                ll += log_inv_area;
            }
        } else {
            const Event& pa = pattern.events[p];
            int m = pa.process, l = e.process;
            ll += std::log(params.alpha(m, l));
            ll += params.temporal(m, l).log_density(e.t - pa.t);
            if (spatial) ll += (*params.spatial)(m, l).log_density(*e.s - *pa.s);
        }
    }
    return static_cast<double>(ll);
}

double marginal_loglik_classic(const EventPattern& pattern, const ModelParams& params) {
    const double T = pattern.horizon;
    const bool spatial = params.is_spatial();
    require(spatial == pattern.spatial(), "pattern spatiality and model spatiality disagree");

    long double ll = 0.0;
    for (int l = 0; l < params.L; ++l) ll -= params.mu[l] * T;

    const double inv_area = spatial ? 1.0 / pattern.window->area() : 1.0;
    const size_t n = pattern.size();
    for (size_t i = 0; i < n; ++i) {
        const Event& e = pattern.events[i];
        for (int l = 0; l < params.L; ++l)
            ll -= params.alpha(e.process, l) * params.temporal(e.process, l).cdf(T - e.t);

        long double lam = params.mu[e.process];
        if (spatial) lam *= pattern.window->contains(*e.s) ? inv_area : 0.0;
        for (size_t j = 0; j < i; ++j) {
            const Event& h = pattern.events[j];
            int m = h.process, l = e.process;
            long double g = params.alpha(m, l) * params.temporal(m, l).density(e.t - h.t);
            if (spatial) g *= (*params.spatial)(m, l).density(*e.s - *h.s);
            lam += g;
        }
        ll += std::log(lam);
    }
    return static_cast<double>(ll);
}

EventPattern drop_locations(const EventPattern& pattern) {
    EventPattern out;
    out.horizon = pattern.horizon;
    out.events.reserve(pattern.size());
    for (const auto& e : pattern.events) out.events.push_back({e.process, e.t, std::nullopt});
    return out;
}

EventPattern clip_to_window(const EventPattern& pattern) {
    if (!pattern.spatial()) return pattern;
    EventPattern out;
    out.horizon = pattern.horizon;
    out.window = pattern.window;
    for (const auto& e : pattern.events)
        if (pattern.window->contains(*e.s)) out.events.push_back(e);
    return out;
}

}  // namespace hawkes
