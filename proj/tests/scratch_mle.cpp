// scratch: crude MLE of (mu, alpha, beta) through the classic marginal
// likelihood on the same dataset the chain trace used
#include <cstdio>

#include "agghawkes/process.hpp"
#include "agghawkes/simulate.hpp"

using namespace hawkes;

int main() {
    SimulationRequest req;
    req.params = ModelParams::univariate(0.3, 0.7, TemporalKernel::exponential(1.0));
    req.t_end = 500.0;
    req.seed = 314;
    auto pattern = simulate(req).pattern;
    std::printf("n = %zu\n", pattern.size());

    double best = -1e300;
    double bm = 0, ba = 0, bb = 0;
    for (double mu = 0.20; mu <= 0.55; mu += 0.01)
        for (double alpha = 0.35; alpha <= 0.9; alpha += 0.01)
            for (double beta = 0.5; beta <= 2.0; beta += 0.05) {
                auto params = ModelParams::univariate(mu, alpha, TemporalKernel::exponential(beta));
                double ll = marginal_loglik_classic(pattern, params);
                if (ll > best) {
                    best = ll;
                    bm = mu;
                    ba = alpha;
                    bb = beta;
                }
            }
    std::printf("MLE: mu=%.3f alpha=%.3f beta=%.3f (ll=%.3f)\n", bm, ba, bb, best);
    auto truth = ModelParams::univariate(0.3, 0.7, TemporalKernel::exponential(1.0));
    std::printf("ll at truth = %.3f\n", marginal_loglik_classic(pattern, truth));
    return 0;
}
