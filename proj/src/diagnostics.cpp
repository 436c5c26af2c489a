#include "agghawkes/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hawkes {

namespace {

double mean_of(const std::vector<double>& v) {
    long double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : static_cast<double>(s / v.size());
}

double sample_var(const std::vector<double>& v, double m) {
    if (v.size() < 2) return 0.0;
    long double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return static_cast<double>(s / (v.size() - 1));
}

double rhat_impl(const std::vector<std::vector<double>>& chains) {
    const size_t M = chains.size();
    const size_t N = chains[0].size();
    for (const auto& c : chains)
        require(c.size() == N, "rhat requires equal-length chains");
    require(N >= 10, "rhat requires at least 10 draws per chain");

    std::vector<double> means(M);
    double W = 0.0;
    for (size_t m = 0; m < M; ++m) {
        means[m] = mean_of(chains[m]);
        W += sample_var(chains[m], means[m]);
    }
    W /= M;
    double grand = mean_of(means);
    double B = N * sample_var(means, grand);
    if (W <= 0.0) return 1.0;
    double v_hat = (static_cast<double>(N - 1) / N) * W + B / N;
    return std::max(1.0, std::sqrt(v_hat / W));
}

}  // namespace

double rhat(const std::vector<std::vector<double>>& chains) {
    require(chains.size() >= 2, "rhat requires at least two chains");
    return rhat_impl(chains);
}

double split_rhat(const std::vector<std::vector<double>>& chains) {
    require(!chains.empty(), "split_rhat requires at least one chain");
    std::vector<std::vector<double>> halves;
    for (const auto& c : chains) {
        size_t h = c.size() / 2;
        require(h >= 10, "split_rhat requires at least 20 draws per chain");
        halves.emplace_back(c.begin(), c.begin() + h);
        halves.emplace_back(c.end() - h, c.end());
    }
    return rhat_impl(halves);
}

double ess(const std::vector<double>& chain) {
    const size_t N = chain.size();
    require(N >= 100, "ess requires at least 100 draws");
    double m = mean_of(chain);
    double v = sample_var(chain, m);
    if (v <= 0.0) return 0.0;

    auto rho = [&](size_t k) {
        long double s = 0.0;
        for (size_t i = 0; i + k < N; ++i) s += (chain[i] - m) * (chain[i + k] - m);
        return static_cast<double>(s / ((N - 1) * v));
    };

    // Geyer: sum consecutive-pair autocorrelations while positive, enforcing
    // monotone nonincreasing pair sums
    double tau = 1.0;
    double prev_pair = std::numeric_limits<double>::infinity();
    for (size_t k = 1; k + 1 < N; k += 2) {
        double pair = rho(k) + rho(k + 1);
        if (pair <= 0.0) break;
        pair = std::min(pair, prev_pair);
        prev_pair = pair;
        tau += 2.0 * pair;
    }
    return std::min(static_cast<double>(N), N / tau);
}

double quantile(std::vector<double> values, double q) {
    require(!values.empty(), "quantile of an empty sample");
    require(q >= 0.0 && q <= 1.0, "quantile level outside [0,1]");
    std::sort(values.begin(), values.end());
    double pos = q * (values.size() - 1);
    size_t i = static_cast<size_t>(pos);
    if (i + 1 >= values.size()) return values.back();
    double frac = pos - i;
    return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

std::map<std::string, ParamSummary> summarize(const mcmc::PosteriorSamples& samples,
                                              bool use_split_rhat) {
    require(samples.chain_count() > 0 && samples.rows(0) > 0, "no posterior draws");
    std::map<std::string, ParamSummary> out;
    for (const auto& name : samples.param_names) {
        std::vector<std::vector<double>> chains;
        for (int ch = 0; ch < samples.chain_count(); ++ch)
            chains.push_back(samples.chain_column(ch, name));

        std::vector<double> pooled;
        for (const auto& c : chains) pooled.insert(pooled.end(), c.begin(), c.end());

        ParamSummary s;
        s.mean = mean_of(pooled);
        s.sd = std::sqrt(sample_var(pooled, s.mean));
        s.q025 = quantile(pooled, 0.025);
        s.q50 = quantile(pooled, 0.5);
        s.q975 = quantile(pooled, 0.975);
        s.ci_length = s.q975 - s.q025;
        if (chains.size() >= 2) {
            s.rhat = use_split_rhat ? split_rhat(chains) : rhat(chains);
        } else {
            s.rhat = std::numeric_limits<double>::quiet_NaN();
        }
        s.ess = 0.0;
        for (const auto& c : chains) s.ess += c.size() >= 100 ? ess(c) : 0.0;
        out[name] = s;
    }
    return out;
}

}  // namespace hawkes
