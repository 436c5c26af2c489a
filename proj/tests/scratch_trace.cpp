// scratch: trace one chain on the failing configuration
#include <cstdio>

#include "agghawkes/aggregate.hpp"
#include "agghawkes/mcmc.hpp"
#include "agghawkes/simulate.hpp"

using namespace hawkes;
using namespace hawkes::mcmc;

int main() {
    SimulationRequest req;
    req.params = ModelParams::univariate(0.3, 0.7, TemporalKernel::exponential(1.0));
    req.t_end = 500.0;
    req.seed = 314;
    auto pattern = simulate(req).pattern;
    std::printf("n = %zu\n", pattern.size());
    auto spec = BinSpec::uniform(1, 1.0, std::nullopt, 500.0, std::nullopt);
    ObservedData data = ObservedData::from_pattern(pattern, spec);
    Priors priors;
    SamplerConfig config;
    config.iterations = 4000;
    config.burnin = 2000;
    config.seed = 99;

    for (int chain = 0; chain < 2; ++chain) {
        Rng rng = Rng(config.seed).derive(0x636861696eULL, (uint64_t)chain);
        ChainState st = init_state(data, priors, config, rng);
        std::printf("chain %d init: mu=%.4f alpha=%.4f beta=%.4f\n", chain, st.params.mu[0],
                    st.params.alpha(0, 0), st.params.temporal(0, 0).beta());
        for (int iter = 1; iter <= 4000; ++iter) {
            st.in_burnin = iter <= config.burnin;
            update_latent(st, config, rng);
            update_branching(st, config, rng);
            update_conjugate(st, priors, rng);
            update_rate_mh(st, priors, config, rng, iter <= config.burnin);
            if (iter % 200 == 0 || iter <= 10) {
                int64_t D = 0;
                for (int p : st.parent)
                    if (p != kImmigrant) ++D;
                std::printf(
                    "  it %4d: mu=%.4f alpha=%.4f beta=%.4g D=%lld sigma=%.4g acc=%.3f\n", iter,
                    st.params.mu[0], st.params.alpha(0, 0), st.params.temporal(0, 0).beta(),
                    (long long)D, st.sigma_rate[0],
                    (st.in_burnin ? st.accept_adapt : st.accept_sample).rate_mh.rate());
            }
        }
    }
    return 0;
}
