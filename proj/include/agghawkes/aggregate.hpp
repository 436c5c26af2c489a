#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "agghawkes/common.hpp"
#include "agghawkes/process.hpp"

namespace hawkes {

// Binning resolution for one process. dt == 0 means exact times (each event
// its own degenerate bin); ds == 0 means exact locations; ds unset means the
// data carry no spatial information at all.
struct ProcessBins {
    double dt = 0.0;
    std::optional<double> ds;
};

// Half-open bins B_i = [(i-1)dt, i*dt) tiling [0, T), and square cells tiling
// W; when dt does not divide T the final bin is the shorter remainder, and
// likewise for ragged edge cells in space.
struct BinSpec {
    std::vector<ProcessBins> per_process;
    double horizon = 0.0;
    std::optional<Window> window;

    int process_count() const { return static_cast<int>(per_process.size()); }
    bool spatial() const;
    void validate() const;

    int time_bin_count(int process) const;
    int cell_count_x(int process) const;
    int cell_count_y(int process) const;
    // [lo, hi) bounds of time bin b
    std::pair<double, double> time_bin_bounds(int process, int b) const;
    Window cell_bounds(int process, int cx, int cy) const;
    int time_bin_of(int process, double t) const;
    std::pair<int, int> cell_of(int process, Vec2 s) const;

    static BinSpec uniform(int L, double dt, std::optional<double> ds, double horizon,
                           std::optional<Window> window);
};

// Per-process dense count arrays over (time bin, cell x, cell y).
struct AggregatedCounts {
    BinSpec spec;
    // counts[l][(b * nx + cx) * ny + cy]
    std::vector<std::vector<int64_t>> counts;

    int64_t at(int process, int b, int cx = 0, int cy = 0) const;
    int64_t& at(int process, int b, int cx = 0, int cy = 0);
    int64_t total(int process) const;
    int64_t total() const;
};

// Deterministic binning of an exact pattern; throws when an event lies
// outside every bin, naming the event.
AggregatedCounts aggregate(const EventPattern& pattern, const BinSpec& spec);

// True iff aggregate(pattern, counts.spec) equals counts element-wise.
bool is_consistent(const EventPattern& pattern, const AggregatedCounts& counts);

}  // namespace hawkes
