#pragma once

namespace hawkes {

// Regularized lower incomplete gamma P(a, x).
double gammp(double a, double x);
// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gammq(double a, double x);
// Inverse of P(a, .): x with P(a, x) = p.
double gammp_inv(double a, double p);
// Chi-squared upper tail probability with k degrees of freedom.
double chi2_sf(double x, double k);

}  // namespace hawkes
