#pragma once

#include <string>
#include <vector>

#include "agghawkes/mcmc.hpp"
#include "agghawkes/simulate.hpp"

namespace hawkes {

// Posterior-predictive forecasting: each stored (theta, latent pattern)
// snapshot is rolled forward over (T, T+h] with simulate_forward.
struct PredictiveRequest {
    double horizon = 0.0;        // h
    int draws_per_snapshot = 1;
    uint64_t seed = 0;
};

std::vector<EventPattern> posterior_predictive(const mcmc::PosteriorSamples& posterior,
                                               double data_horizon,
                                               const PredictiveRequest& request);

struct CountSummary {
    double mean = 0.0;
    double q025 = 0.0;
    double q50 = 0.0;
    double q975 = 0.0;
    std::vector<int64_t> histogram;  // histogram[k] = forecasts with k events
    std::vector<int64_t> counts;     // per-forecast counts
};

// Events of each forecast falling inside `region` (ignored for temporal
// forecasts when unset) and the absolute time window (t_from, t_to].
CountSummary count_in(const std::vector<EventPattern>& forecasts,
                      const std::optional<Window>& region, double t_from, double t_to);

}  // namespace hawkes
