#include "agghawkes/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "agghawkes/diagnostics.hpp"

namespace hawkes {

std::vector<EventPattern> posterior_predictive(const mcmc::PosteriorSamples& posterior,
                                               double data_horizon,
                                               const PredictiveRequest& request) {
    require(request.horizon >= 0.0, "forecast horizon must be nonnegative");
    require(request.draws_per_snapshot >= 1, "draws_per_snapshot must be >= 1");
    size_t n_snapshots = 0;
    for (const auto& per_chain : posterior.snapshots) n_snapshots += per_chain.size();
    if (n_snapshots == 0)
        throw std::invalid_argument(
            "posterior carries no latent snapshots; re-fit with latent recording enabled");

    std::vector<EventPattern> forecasts;
    forecasts.reserve(n_snapshots * request.draws_per_snapshot);
    Rng root(request.seed);
    size_t snap_idx = 0;
    for (const auto& per_chain : posterior.snapshots) {
        for (const auto& snap : per_chain) {
            for (int d = 0; d < request.draws_per_snapshot; ++d) {
                Rng rng = root.derive(snap_idx, static_cast<uint64_t>(d));
                forecasts.push_back(simulate_forward(snap.params, snap.pattern, data_horizon,
                                                     request.horizon, rng));
            }
            ++snap_idx;
        }
    }
    return forecasts;
}

CountSummary count_in(const std::vector<EventPattern>& forecasts,
                      const std::optional<Window>& region, double t_from, double t_to) {
    require(t_to >= t_from, "empty time window");
    CountSummary out;
    out.counts.reserve(forecasts.size());
    for (const auto& f : forecasts) {
        int64_t n = 0;
        for (const auto& e : f.events) {
            if (e.t <= t_from || e.t > t_to) continue;
            if (region) {
                require(e.s.has_value(), "spatial region given for a temporal forecast");
                if (!region->contains(*e.s)) continue;
            }
            ++n;
        }
        out.counts.push_back(n);
    }
    if (out.counts.empty()) return out;

    std::vector<double> as_double(out.counts.begin(), out.counts.end());
    long double total = 0.0;
    int64_t max_count = 0;
    for (int64_t c : out.counts) {
        total += c;
        max_count = std::max(max_count, c);
    }
    out.mean = static_cast<double>(total / out.counts.size());
    out.q025 = quantile(as_double, 0.025);
    out.q50 = quantile(as_double, 0.5);
    out.q975 = quantile(as_double, 0.975);
    out.histogram.assign(max_count + 1, 0);
    for (int64_t c : out.counts) ++out.histogram[c];
    return out;
}

}  // namespace hawkes
