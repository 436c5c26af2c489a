#include "agghawkes/kernels.hpp"

#include <limits>

namespace hawkes {

namespace {
constexpr double kTwoPi = 6.283185307179586477;
}

TemporalKernel TemporalKernel::exponential(double beta) {
    require(beta > 0.0, "Exponential kernel requires rate beta > 0");
    return {TemporalFamily::Exponential, beta, 0.0};
}

TemporalKernel TemporalKernel::lomax(double c, double p) {
    require(c > 0.0, "Lomax kernel requires scale c > 0");
    require(p > 1.0, "Lomax kernel requires shape p > 1");
    return {TemporalFamily::Lomax, c, p};
}

double TemporalKernel::log_density(double t) const {
    require(t >= 0.0, "temporal kernel evaluated at negative lag");
    if (family_ == TemporalFamily::Exponential) return std::log(a_) - a_ * t;
    return std::log(b_ - 1.0) + (b_ - 1.0) * std::log(a_) - b_ * std::log(t + a_);
}

double TemporalKernel::log_sf(double t) const {
    if (family_ == TemporalFamily::Exponential) return -a_ * t;
    return (b_ - 1.0) * (std::log(a_) - std::log(a_ + t));
}

double TemporalKernel::cdf(double t) const {
    require(t >= 0.0, "temporal kernel cdf at negative lag");
    if (std::isinf(t)) return 1.0;
    return -std::expm1(log_sf(t));
}

double TemporalKernel::cdf_between(double lo, double hi) const {
    require(lo >= 0.0 && hi >= lo, "cdf_between requires 0 <= lo <= hi");
    if (std::isinf(hi)) return std::exp(log_sf(lo));
    // sf(lo) - sf(hi) = sf(lo) * (1 - sf(hi)/sf(lo)), exact in the deep tail
    return std::exp(log_sf(lo)) * (-std::expm1(log_sf(hi) - log_sf(lo)));
}

double TemporalKernel::quantile(double q) const {
    require(q >= 0.0 && q <= 1.0, "quantile level outside [0,1]");
    if (q == 1.0) return std::numeric_limits<double>::infinity();
    if (family_ == TemporalFamily::Exponential) return -std::log1p(-q) / a_;
    return a_ * std::expm1(-std::log1p(-q) / (b_ - 1.0));
}

double TemporalKernel::sample_truncated(double lo, double hi, Rng& rng) const {
    require(lo >= 0.0 && hi > lo, "sample_truncated requires 0 <= lo < hi");
    // Condition on X > lo first: the conditional law is again closed form
    // (memorylessness for the exponential, scale shift c -> c + lo for Lomax),
    // then invert the cdf of the remainder on (0, hi - lo).
    double mass_hi = 1.0;
    if (!std::isinf(hi)) {
        mass_hi = -std::expm1(log_sf(hi) - log_sf(lo));
        if (!(mass_hi > 0.0)) throw std::invalid_argument("sample_truncated: interval has zero kernel mass");
    }
    double u = rng.uniform() * mass_hi;
    double offset;
    if (family_ == TemporalFamily::Exponential) {
        offset = -std::log1p(-u) / a_;
    } else {
        double c_shift = a_ + lo;
        offset = c_shift * std::expm1(-std::log1p(-u) / (b_ - 1.0));
    }
    double t = lo + offset;
    // inverse-cdf can land on hi under rounding; fold back inside
    if (!std::isinf(hi) && t >= hi) t = std::nextafter(hi, lo);
    return t;
}

double TemporalKernel::mean() const {
    if (family_ == TemporalFamily::Exponential) return 1.0 / a_;
    if (b_ <= 2.0) return std::numeric_limits<double>::infinity();
    return a_ / (b_ - 2.0);
}

SpatialKernel::SpatialKernel(double gamma) : gamma_(gamma) {
    require(gamma > 0.0, "SpatialKernel requires bandwidth gamma > 0");
}

double SpatialKernel::log_density(Vec2 offset) const {
    double g2 = gamma_ * gamma_;
    return -std::log(kTwoPi * g2) - squared_norm(offset) / (2.0 * g2);
}

Vec2 SpatialKernel::sample(Rng& rng) const {
    return {gamma_ * rng.normal(), gamma_ * rng.normal()};
}

}  // namespace hawkes
