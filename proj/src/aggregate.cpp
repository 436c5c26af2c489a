#include "agghawkes/aggregate.hpp"

#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

namespace hawkes {

namespace {

int ragged_bin_count(double extent, double width) {
    int n = static_cast<int>(std::ceil(extent / width - 1e-12));
    return std::max(n, 1);
}

int index_of(double v, double origin, double width, int nbins) {
    int b = static_cast<int>(std::floor((v - origin) / width));
    // settle rounding at the edges so membership agrees with the bin bounds
    while (b > 0 && v < origin + b * width) --b;
    while (b + 1 < nbins && v >= origin + (b + 1) * width) ++b;
    return std::min(std::max(b, 0), nbins - 1);
}

}  // namespace

bool BinSpec::spatial() const {
    for (const auto& pb : per_process)
        if (pb.ds.has_value()) return true;
    return false;
}

void BinSpec::validate() const {
    require(!per_process.empty(), "BinSpec needs at least one process");
    require(horizon > 0.0, "BinSpec horizon must be positive");
    for (const auto& pb : per_process) {
        require(pb.dt >= 0.0, "time bin length must be >= 0");
        if (pb.ds) {
            require(*pb.ds >= 0.0, "space cell side must be >= 0");
            require(window.has_value(), "spatial bins require a window");
        }
    }
    if (window) require(window->area() > 0.0, "window must have positive area");
}

int BinSpec::time_bin_count(int process) const {
    double dt = per_process[process].dt;
    require(dt > 0.0, "time_bin_count undefined for exact (dt = 0) data");
    return ragged_bin_count(horizon, dt);
}

int BinSpec::cell_count_x(int process) const {
    const auto& ds = per_process[process].ds;
    if (!ds) return 1;
    require(*ds > 0.0, "cell_count undefined for exact (ds = 0) locations");
    return ragged_bin_count(window->width(), *ds);
}

int BinSpec::cell_count_y(int process) const {
    const auto& ds = per_process[process].ds;
    if (!ds) return 1;
    require(*ds > 0.0, "cell_count undefined for exact (ds = 0) locations");
    return ragged_bin_count(window->height(), *ds);
}

std::pair<double, double> BinSpec::time_bin_bounds(int process, int b) const {
    double dt = per_process[process].dt;
    return {b * dt, std::min((b + 1) * dt, horizon)};
}

Window BinSpec::cell_bounds(int process, int cx, int cy) const {
    double ds = *per_process[process].ds;
    const Window& w = *window;
    return {w.x0 + cx * ds, w.y0 + cy * ds,
            std::min(w.x0 + (cx + 1) * ds, w.x1), std::min(w.y0 + (cy + 1) * ds, w.y1)};
}

int BinSpec::time_bin_of(int process, double t) const {
    return index_of(t, 0.0, per_process[process].dt, time_bin_count(process));
}

std::pair<int, int> BinSpec::cell_of(int process, Vec2 s) const {
    double ds = *per_process[process].ds;
    return {index_of(s.x, window->x0, ds, cell_count_x(process)),
            index_of(s.y, window->y0, ds, cell_count_y(process))};
}

BinSpec BinSpec::uniform(int L, double dt, std::optional<double> ds, double horizon,
                         std::optional<Window> window) {
    BinSpec spec;
    spec.per_process.assign(L, ProcessBins{dt, ds});
    spec.horizon = horizon;
    spec.window = window;
    spec.validate();
    return spec;
}

int64_t AggregatedCounts::at(int process, int b, int cx, int cy) const {
    int nx = spec.cell_count_x(process), ny = spec.cell_count_y(process);
    return counts[process][(static_cast<size_t>(b) * nx + cx) * ny + cy];
}

int64_t& AggregatedCounts::at(int process, int b, int cx, int cy) {
    int nx = spec.cell_count_x(process), ny = spec.cell_count_y(process);
    return counts[process][(static_cast<size_t>(b) * nx + cx) * ny + cy];
}

int64_t AggregatedCounts::total(int process) const {
    return std::accumulate(counts[process].begin(), counts[process].end(), int64_t{0});
}

int64_t AggregatedCounts::total() const {
    int64_t n = 0;
    for (size_t l = 0; l < counts.size(); ++l) n += total(static_cast<int>(l));
    return n;
}

AggregatedCounts aggregate(const EventPattern& pattern, const BinSpec& spec) {
    spec.validate();
    const int L = spec.process_count();
    for (const auto& pb : spec.per_process) {
        require(pb.dt > 0.0, "aggregate requires positive time bin lengths");
        if (pb.ds) require(*pb.ds > 0.0, "aggregate requires positive cell sides");
    }

    AggregatedCounts out;
    out.spec = spec;
    out.counts.resize(L);
    for (int l = 0; l < L; ++l) {
        size_t sz = static_cast<size_t>(spec.time_bin_count(l)) * spec.cell_count_x(l) *
                    spec.cell_count_y(l);
        out.counts[l].assign(sz, 0);
    }

    for (size_t i = 0; i < pattern.size(); ++i) {
        const Event& e = pattern.events[i];
        auto where = [&] {
            return "event " + std::to_string(i) + " (process " + std::to_string(e.process + 1) +
                   ", t = " + std::to_string(e.t) + ")";
        };
        if (e.process >= L) throw std::invalid_argument(where() + " beyond BinSpec processes");
        if (e.t < 0.0 || e.t >= spec.horizon)
            throw std::invalid_argument(where() + " outside every time bin");
        int b = spec.time_bin_of(e.process, e.t);
        int cx = 0, cy = 0;
        if (spec.per_process[e.process].ds) {
            if (!e.s || !spec.window->contains(*e.s))
                throw std::invalid_argument(where() + " outside every spatial cell");
            std::tie(cx, cy) = spec.cell_of(e.process, *e.s);
        }
        ++out.at(e.process, b, cx, cy);
    }
    return out;
}

bool is_consistent(const EventPattern& pattern, const AggregatedCounts& counts) {
    AggregatedCounts redo;
    try {
        redo = aggregate(pattern, counts.spec);
    } catch (const std::invalid_argument&) {
        return false;
    }
    return redo.counts == counts.counts;
}

}  // namespace hawkes
