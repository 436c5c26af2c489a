#pragma once

#include <cmath>

#include "agghawkes/common.hpp"
#include "agghawkes/rng.hpp"

namespace hawkes {

enum class TemporalFamily { Exponential, Lomax };

// Excitation density on [0, inf): Exponential(rate beta) or Lomax(scale c, shape p).
// Both have closed-form cdf and quantile, so truncated sampling is exact
// inverse-cdf and rejection-free.
class TemporalKernel {
  public:
    static TemporalKernel exponential(double beta);
    static TemporalKernel lomax(double c, double p);

    TemporalFamily family() const { return family_; }
    double beta() const { return a_; }
    double lomax_c() const { return a_; }
    double lomax_p() const { return b_; }

    double density(double t) const { return std::exp(log_density(t)); }
    double log_density(double t) const;
    // G(t) = integral of the density over [0, t].
    double cdf(double t) const;
    // P(lo < X <= hi); stable for intervals deep in the tail.
    double cdf_between(double lo, double hi) const;
    double quantile(double q) const;
    // Draw from the density restricted and renormalized to (lo, hi);
    // hi may be +inf. (0, inf) recovers the untruncated draw.
    double sample_truncated(double lo, double hi, Rng& rng) const;
    double mean() const;
    double median() const { return quantile(0.5); }

    friend bool operator==(const TemporalKernel& x, const TemporalKernel& y) {
        return x.family_ == y.family_ && x.a_ == y.a_ && x.b_ == y.b_;
    }

  private:
    TemporalKernel(TemporalFamily f, double a, double b) : family_(f), a_(a), b_(b) {}
    // survival 1 - G(t), and its log
    double log_sf(double t) const;

    TemporalFamily family_ = TemporalFamily::Exponential;
    double a_ = 1.0;  // beta, or Lomax c
    double b_ = 0.0;  // Lomax p
};

// Isotropic bivariate Gaussian displacement with bandwidth gamma per coordinate.
class SpatialKernel {
  public:
    explicit SpatialKernel(double gamma);

    double gamma() const { return gamma_; }
    double density(Vec2 offset) const { return std::exp(log_density(offset)); }
    double log_density(Vec2 offset) const;
    Vec2 sample(Rng& rng) const;

    friend bool operator==(const SpatialKernel& x, const SpatialKernel& y) {
        return x.gamma_ == y.gamma_;
    }

  private:
    double gamma_ = 1.0;
};

}  // namespace hawkes
