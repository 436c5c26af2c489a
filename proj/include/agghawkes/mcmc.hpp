#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agghawkes/aggregate.hpp"
#include "agghawkes/process.hpp"
#include "agghawkes/rng.hpp"

namespace hawkes::mcmc {

// Independent priors: Gamma(shape, rate) for mu, for alpha truncated to (0,1),
// and for the exponential rate beta; InverseGamma for gamma^2. The Lomax
// variant places Gamma priors on c and on p - 1.
struct Priors {
    double mu_shape = 1.0, mu_rate = 0.01;
    double alpha_shape = 1.0, alpha_rate = 0.01;
    double rate_shape = 1.0, rate_rate = 0.01;
    double gamma_sq_shape = 0.001, gamma_sq_rate = 0.001;
    double lomax_c_shape = 1.0, lomax_c_rate = 0.01;
    double lomax_pm1_shape = 1.0, lomax_pm1_rate = 0.01;

    void validate() const;
};

enum class LatentStrategy { OneAtATime, ByGeneration, ByCluster };

struct SamplerConfig {
    int iterations = 4000;
    int burnin = 2000;
    int thin = 1;
    int chains = 2;
    uint64_t seed = 0;
    LatentStrategy strategy = LatentStrategy::OneAtATime;
    TemporalFamily kernel_family = TemporalFamily::Exponential;
    // random-walk scale for the kernel rate parameters; adapted toward
    // target_accept during burn-in, frozen afterwards
    double sigma_rate = 0.1;
    double target_accept = 0.3;
    // parent candidates are limited to lags below this kernel quantile
    double q_trunc = 0.999;
    bool record_latent = false;
    int snapshot_stride = 10;

    void validate() const;
};

// One latent event slot: the box the event is constrained to. Exact
// coordinates are degenerate boxes (t_lo == t_hi, zero-area cell).
struct EventSlot {
    int process = 0;
    double t_lo = 0.0, t_hi = 0.0;
    bool has_location = false;
    Window cell;  // degenerate when the location is exact

    bool exact_time() const { return t_lo == t_hi; }
    bool exact_location() const { return cell.x0 == cell.x1; }
};

// What the sampler is conditioned on: per-event constraint boxes derived from
// aggregated counts, from an exact pattern, or from a mix (one axis binned,
// the other exact).
struct ObservedData {
    int L = 1;
    double horizon = 0.0;
    std::optional<Window> window;
    std::vector<EventSlot> slots;
    // per-process time-bin boundaries used to constrain latent times; empty
    // for exact-time processes
    BinSpec spec;

    bool spatial() const { return window.has_value(); }

    static ObservedData from_counts(const AggregatedCounts& counts);
    // dt = 0 and/or ds = 0 (or ds unset) in `spec` keep that axis exact.
    static ObservedData from_pattern(const EventPattern& pattern, const BinSpec& spec);
    static ObservedData from_exact(const EventPattern& pattern);
};

struct MoveStats {
    int64_t proposed = 0;
    int64_t accepted = 0;
    int64_t skipped = 0;

    double rate() const { return proposed > 0 ? static_cast<double>(accepted) / proposed : 0.0; }
    MoveStats& operator+=(const MoveStats& o) {
        proposed += o.proposed;
        accepted += o.accepted;
        skipped += o.skipped;
        return *this;
    }
};

struct AcceptanceReport {
    MoveStats latent_time;
    MoveStats latent_location;
    MoveStats cluster_block;
    MoveStats rate_mh;

    AcceptanceReport& operator+=(const AcceptanceReport& o) {
        latent_time += o.latent_time;
        latent_location += o.latent_location;
        cluster_block += o.cluster_block;
        rate_mh += o.rate_mh;
        return *this;
    }
};

// Sampler state for one chain: parameters, the imputed pattern with its
// branching structure, per-event constraint boxes, and the fixed per-process
// bin index used for parent-candidate scans.
class ChainState {
  public:
    ModelParams params;

    // latent pattern, storage order = time order at initialization
    std::vector<int> proc;
    std::vector<double> t;
    std::vector<Vec2> s;
    std::vector<int> parent;
    std::vector<std::vector<int>> children;
    std::vector<double> t_lo, t_hi;
    std::vector<Window> cell;

    int L = 1;
    double horizon = 0.0;
    std::optional<Window> window;
    bool spatial = false;

    // adaptation state, one scale per (m, l) pair; Lomax keeps two
    std::vector<double> sigma_rate;
    std::vector<double> sigma_rate2;
    int64_t adapt_step = 0;
    bool in_burnin = true;

    AcceptanceReport accept_adapt;   // during burn-in
    AcceptanceReport accept_sample;  // after burn-in

    size_t size() const { return t.size(); }
    EventPattern latent_pattern() const;
    BranchingStructure branching() const { return {parent}; }
    void rebuild_children();
    // Enforces Eq.-(7)-style agreement with the observed boxes plus branching
    // validity; throws std::logic_error on violation.
    void check_consistency() const;

    // parent-candidate scan support
    struct ProcScan {
        std::vector<double> lo, hi;  // per bin, ordered, disjoint
        std::vector<int> begin;      // CSR offsets into ids, size bins+1
        std::vector<int> ids;
    };
    std::vector<ProcScan> scan;
    // calls fn(j) for events j of process m with t_j in (tmin, tmax)
    template <typename Fn>
    void for_candidates(int m, double tmin, double tmax, Fn&& fn) const;
};

struct LatentSnapshot {
    ModelParams params;
    EventPattern pattern;
};

struct PosteriorSamples {
    std::vector<std::string> param_names;
    // draws[chain] is row-major with stride param_names.size()
    std::vector<std::vector<double>> draws;
    std::vector<std::vector<int>> iterations;  // absolute iteration per row
    std::vector<std::vector<LatentSnapshot>> snapshots;
    std::vector<double> chain_seconds;
    AcceptanceReport acceptance;  // post-burn-in, pooled over chains

    int chain_count() const { return static_cast<int>(draws.size()); }
    size_t rows(int chain) const { return param_names.empty() ? 0 : draws[chain].size() / param_names.size(); }
    double value(int chain, size_t row, size_t col) const {
        return draws[chain][row * param_names.size() + col];
    }
    int column(const std::string& name) const;
    // all draws of one parameter in one chain
    std::vector<double> chain_column(int chain, const std::string& name) const;
    // pooled across chains
    std::vector<double> pooled(const std::string& name) const;
};

std::vector<std::string> param_names(const ModelParams& params, TemporalFamily family);
std::vector<double> param_values(const ModelParams& params, TemporalFamily family);

// --- sampler steps ---------------------------------------------------------

ChainState init_state(const ObservedData& data, const Priors& priors,
                      const SamplerConfig& config, Rng& rng);

// Gibbs draws for mu, alpha, gamma^2 from their closed-form conditionals.
void update_conjugate(ChainState& state, const Priors& priors, Rng& rng);

// Multinomial draw of each event's parent, truncated to lags below the
// q_trunc kernel quantile.
void update_branching(ChainState& state, const SamplerConfig& config, Rng& rng);

// Random-walk Metropolis for beta (or for log c, log(p-1) under Lomax).
void update_rate_mh(ChainState& state, const Priors& priors, const SamplerConfig& config,
                    Rng& rng, bool adapt);

// Latent time and location moves under the configured strategy.
void update_latent(ChainState& state, const SamplerConfig& config, Rng& rng);

// One full chain: sweeps of update_latent -> update_branching ->
// update_conjugate -> update_rate_mh, recording post-burn-in thinned draws.
PosteriorSamples run_chain(const ObservedData& data, const Priors& priors,
                           const SamplerConfig& config, int chain_id);

// All chains (in parallel when jobs > 1), merged.
PosteriorSamples run_sampler(const ObservedData& data, const Priors& priors,
                             const SamplerConfig& config, int jobs = 0);

// Truncated-to-(0,1) Gamma(shape, rate) draw: inverse cdf on the truncated
// mass with a rejection fallback.
double sample_trunc_gamma01(double shape, double rate, Rng& rng);

namespace detail {
// Log multinomial weights for event i's parent candidates; returns candidate
// event ids aligned with weights, immigrant weight in log_w0.
void branching_weights(const ChainState& state, int i, double q_trunc,
                       std::vector<int>& candidates, std::vector<double>& log_w,
                       double& log_w0);
// Log acceptance ratio of moving event i's time to t_new (other coordinates
// fixed); equals the joint log density difference.
double time_move_log_ratio(const ChainState& state, int i, double t_new);
// Same for a location move.
double location_move_log_ratio(const ChainState& state, int i, Vec2 s_new);
// Log acceptance ratio for a rate-parameter move on pair (m, l).
double rate_move_log_ratio(const ChainState& state, int m, int l,
                           const TemporalKernel& proposed);
}  // namespace detail

template <typename Fn>
void ChainState::for_candidates(int m, double tmin, double tmax, Fn&& fn) const {
    const ProcScan& ps = scan[m];
    size_t b = std::upper_bound(ps.hi.begin(), ps.hi.end(), tmin) - ps.hi.begin();
    for (; b < ps.lo.size() && ps.lo[b] < tmax; ++b) {
        for (int k = ps.begin[b]; k < ps.begin[b + 1]; ++k) {
            int j = ps.ids[k];
            if (t[j] > tmin && t[j] < tmax) fn(j);
        }
    }
}

}  // namespace hawkes::mcmc
