#pragma once

#include <optional>
#include <vector>

#include "agghawkes/common.hpp"
#include "agghawkes/kernels.hpp"

namespace hawkes {

struct Event {
    int process = 0;  // 0-based internally; 1-based in CSV files
    double t = 0.0;
    std::optional<Vec2> s;
};

// A point pattern on [0, horizon), optionally with locations in a window W.
// Either every event carries a location or none does. Times are strictly
// increasing within each process (ties are jittered at ingestion).
struct EventPattern {
    std::vector<Event> events;  // sorted by time
    double horizon = 0.0;
    std::optional<Window> window;

    int process_count() const;
    bool spatial() const { return window.has_value(); }
    size_t size() const { return events.size(); }

    // Sorts, validates invariants; throws std::invalid_argument on violation.
    static EventPattern create(std::vector<Event> events, double horizon,
                               std::optional<Window> window);
};

inline constexpr int kImmigrant = -1;

// Parent pointer per event (index into the pattern's event list, or kImmigrant).
struct BranchingStructure {
    std::vector<int> parent;

    // parent-before-child and index-range validity against a pattern
    void validate(const EventPattern& pattern) const;
    static BranchingStructure all_immigrant(size_t n) {
        return {std::vector<int>(n, kImmigrant)};
    }
};

struct ModelParams {
    int L = 1;
    std::vector<double> mu;                          // background rates, size L
    PairMatrix<double> alpha;                        // branching ratios (source, target)
    PairMatrix<TemporalKernel> temporal;             // lag kernels (source, target)
    std::optional<PairMatrix<SpatialKernel>> spatial;

    bool is_spatial() const { return spatial.has_value(); }
    // Throws on invalid shapes or values; warns (returns false) when the
    // spectral radius of alpha reaches 1, without enforcing it.
    bool validate() const;

    static ModelParams univariate(double mu, double alpha, TemporalKernel kernel,
                                  std::optional<SpatialKernel> spatial = std::nullopt);
};

// Conditional intensity of process `process` at (t, s) given the realized
// history of `pattern` before t. The immigrant location density is
// f(s) = |W|^{-1} 1{s in W}; temporal patterns omit all spatial factors.
double conditional_intensity(const ModelParams& params, const EventPattern& pattern,
                             int process, double t, std::optional<Vec2> s = std::nullopt);

// Log density of (pattern, branching) under the cluster-process factorization,
// using the large-window approximation for the spatial component: background
// mass mu*T, offspring displacement densities not renormalized to W.
double joint_loglik(const EventPattern& pattern, const BranchingStructure& branching,
                    const ModelParams& params);

// Log likelihood of the pattern with the branching structure marginalized out:
// sum of log intensities minus the compensator, both in closed form.
double marginal_loglik_classic(const EventPattern& pattern, const ModelParams& params);

// Copy without spatial information (for fitting a temporal model to spatial data).
EventPattern drop_locations(const EventPattern& pattern);
// Copy keeping only events inside the window (spatial binning covers W only).
EventPattern clip_to_window(const EventPattern& pattern);

}  // namespace hawkes
