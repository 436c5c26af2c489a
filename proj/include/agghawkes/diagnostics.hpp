#pragma once

#include <map>
#include <string>
#include <vector>

#include "agghawkes/mcmc.hpp"

namespace hawkes {

// Gelman-Rubin potential scale reduction factor over >= 2 equal-length
// chains, sqrt(((N-1)/N * W + B/N) / W), reported as max(., 1).
double rhat(const std::vector<std::vector<double>>& chains);
// Split-half variant: each chain contributes its two halves.
double split_rhat(const std::vector<std::vector<double>>& chains);

// Effective sample size N / (1 + 2 sum rho_k), autocorrelations truncated by
// the initial monotone positive sequence. A constant chain reports 0.
double ess(const std::vector<double>& chain);

// Empirical quantile with linear interpolation.
double quantile(std::vector<double> values, double q);

struct ParamSummary {
    double mean = 0.0;
    double sd = 0.0;
    double q025 = 0.0;
    double q50 = 0.0;
    double q975 = 0.0;
    double ci_length = 0.0;
    double rhat = 0.0;  // NaN for a single chain
    double ess = 0.0;   // summed across chains
};

// Pooled posterior summaries per parameter.
std::map<std::string, ParamSummary> summarize(const mcmc::PosteriorSamples& samples,
                                              bool use_split_rhat = false);

}  // namespace hawkes
