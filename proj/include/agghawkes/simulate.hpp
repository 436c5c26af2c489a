#pragma once

#include <optional>
#include <utility>

#include "agghawkes/process.hpp"
#include "agghawkes/rng.hpp"

namespace hawkes {

// Generative sampling through the Poisson-cluster representation. Immigrants
// are homogeneous Poisson on the horizon; every event of process m spawns,
// per target process l, Poisson(alpha_{m,l} * mass) children, where mass is
// the kernel cdf over the admissible lag interval. Offspring beyond t_end are
// never generated; offspring outside the spatial window are kept.
struct SimulationRequest {
    ModelParams params;
    double t_start = 0.0;
    double t_end = 0.0;
    std::optional<Window> window;
    uint64_t seed = 0;
    // events strictly before t_start whose residual offspring seed the run
    std::optional<EventPattern> history;
};

struct SimulationResult {
    EventPattern pattern;         // events in [t_start, t_end), sorted by time
    BranchingStructure branching; // parents inside the pattern; children of
                                  // history events are marked kImmigrant
};

SimulationResult simulate(const SimulationRequest& request);

// Forward simulation for forecasting: residual offspring of the history plus
// fresh immigrants-and-descendants on [t_horizon, t_horizon + h).
EventPattern simulate_forward(const ModelParams& params, const EventPattern& history,
                              double t_horizon, double h, Rng& rng);

namespace detail {
// Number of direct children spawned into (lo, hi) lag range.
int64_t sample_offspring_count(double alpha, const TemporalKernel& kernel, double lo,
                               double hi, Rng& rng);
}

}  // namespace hawkes
