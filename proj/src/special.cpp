#include "agghawkes/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hawkes {

namespace {

// Series expansion, converges fast for x < a + 1.
double gser(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x), converges fast for x > a + 1.
double gcf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gammp(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gammp: bad arguments");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gser(a, x) : 1.0 - gcf(a, x);
}

double gammq(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gammq: bad arguments");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gser(a, x) : gcf(a, x);
}

double gammp_inv(double a, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("gammp_inv: p outside [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();

    // Initial guess (Abramowitz & Stegun 26.2.22 + Wilson-Hilferty), then
    // safeguarded Newton on P(a, x) - p.
    const double gln = std::lgamma(a);
    double x;
    if (a > 1.0) {
        double pp = (p < 0.5) ? p : 1.0 - p;
        double t = std::sqrt(-2.0 * std::log(pp));
        double z = (2.30753 + t * 0.27061) / (1.0 + t * (0.99229 + t * 0.04481)) - t;
        if (p < 0.5) z = -z;
        double a1 = 1.0 - 1.0 / (9.0 * a);
        double zc = z / (3.0 * std::sqrt(a));
        x = a * std::pow(a1 + zc, 3.0);
        if (x <= 0.0) x = a * 1e-3;
    } else {
        double t = 1.0 - a * (0.253 + a * 0.12);
        x = (p < t) ? std::pow(p / t, 1.0 / a) : 1.0 - std::log1p(-(p - t) / (1.0 - t));
    }

    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        double f = gammp(a, x) - p;
        if (f > 0.0) hi = x; else lo = x;
        double logdens = -x + (a - 1.0) * std::log(x) - gln;
        double step = f * std::exp(-logdens);
        double xn = x - step;
        if (!(xn > lo && (xn < hi))) xn = std::isinf(hi) ? x * 2.0 : 0.5 * (lo + hi);
        if (std::fabs(xn - x) < 1e-14 * (x + 1e-300)) return xn;
        x = xn;
    }
    return x;
}

double chi2_sf(double x, double k) { return gammq(0.5 * k, 0.5 * x); }

}  // namespace hawkes
