#pragma once

#include <cstdint>
#include <random>

#include "agghawkes/common.hpp"

namespace hawkes {

// Deterministic random stream. The engine is std::mt19937_64 (bit-exact by the
// standard); every distribution draw is implemented here so that seeded output
// is identical across standard library implementations.
class Rng {
  public:
    explicit Rng(uint64_t seed) : seed_(mix(seed)), engine_(seed_) {}

    // Named sub-stream derived from this stream's seed and a list of indices.
    // Streams for (chain, replicate, forecast-draw, ...) all hang off one root.
    template <typename... Ids>
    Rng derive(Ids... ids) const {
        uint64_t h = seed_;
        ((h = mix(h ^ (0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(ids)))), ...);
        return Rng(h, Tag{});
    }

    uint64_t seed() const { return seed_; }

    // Uniform on (0, 1); never returns 0 or 1.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer on [0, n).
    uint64_t uniform_index(uint64_t n);
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    double exponential(double rate);
    int64_t poisson(double mean);
    // Gamma(shape, rate) via Marsaglia-Tsang.
    double gamma(double shape, double rate);
    Vec2 uniform_in(const Window& w) { return {uniform(w.x0, w.x1), uniform(w.y0, w.y1)}; }

  private:
    struct Tag {};
    Rng(uint64_t mixed, Tag) : seed_(mixed), engine_(mixed) {}

    static uint64_t mix(uint64_t z);

    uint64_t seed_ = 0;
    std::mt19937_64 engine_;
};

}  // namespace hawkes
