#include "agghawkes/mcmc.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "agghawkes/special.hpp"

namespace hawkes::mcmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr uint64_t kChainStream = 0x636861696eULL;

double clamp_sigma(double s) { return std::min(std::max(s, 1e-6), 1e6); }

// Metropolis accept test; skips the uniform draw on uphill moves
bool metropolis_accept(double log_ratio, Rng& rng) {
    return log_ratio >= 0.0 || rng.uniform() < std::exp(log_ratio);
}

// G(x2) - G(x1) without cancellation in the deep tail
double cdf_diff(const TemporalKernel& k, double x2, double x1) {
    if (x2 == x1) return 0.0;
    return (x2 > x1) ? k.cdf_between(x1, x2) : -k.cdf_between(x2, x1);
}

int pair_index(int m, int l, int L) { return m * L + l; }

}  // namespace

void Priors::validate() const {
    require(mu_shape > 0 && mu_rate > 0 && alpha_shape > 0 && alpha_rate > 0 &&
                rate_shape > 0 && rate_rate > 0 && gamma_sq_shape > 0 && gamma_sq_rate > 0 &&
                lomax_c_shape > 0 && lomax_c_rate > 0 && lomax_pm1_shape > 0 &&
                lomax_pm1_rate > 0,
            "all prior hyperparameters must be positive");
}

void SamplerConfig::validate() const {
    require(iterations > 0, "iterations must be positive");
    require(burnin >= 0 && burnin < iterations, "burn-in must be below iterations");
    require(thin >= 1, "thinning must be >= 1");
    require(chains >= 1, "need at least one chain");
    require(q_trunc > 0.9 && q_trunc < 1.0, "q_trunc must lie in (0.9, 1)");
    require(sigma_rate > 0, "sigma_rate must be positive");
    require(target_accept > 0 && target_accept < 1, "target_accept must lie in (0,1)");
    require(snapshot_stride >= 1, "snapshot_stride must be >= 1");
}

// --- ObservedData ----------------------------------------------------------

ObservedData ObservedData::from_counts(const AggregatedCounts& counts) {
    counts.spec.validate();
    ObservedData data;
    data.spec = counts.spec;
    data.L = counts.spec.process_count();
    data.horizon = counts.spec.horizon;
    data.window = counts.spec.window;
    for (int l = 0; l < data.L; ++l) {
        const bool has_cells = counts.spec.per_process[l].ds.has_value();
        const int nb = counts.spec.time_bin_count(l);
        const int nx = counts.spec.cell_count_x(l);
        const int ny = counts.spec.cell_count_y(l);
        for (int b = 0; b < nb; ++b)
            for (int cx = 0; cx < nx; ++cx)
                for (int cy = 0; cy < ny; ++cy) {
                    int64_t k = counts.at(l, b, cx, cy);
                    require(k >= 0, "negative count");
                    if (k == 0) continue;
                    EventSlot slot;
                    slot.process = l;
                    std::tie(slot.t_lo, slot.t_hi) = counts.spec.time_bin_bounds(l, b);
                    slot.has_location = has_cells;
                    if (has_cells) slot.cell = counts.spec.cell_bounds(l, cx, cy);
                    for (int64_t r = 0; r < k; ++r) data.slots.push_back(slot);
                }
    }
    return data;
}

ObservedData ObservedData::from_pattern(const EventPattern& pattern, const BinSpec& spec) {
    spec.validate();
    require(spec.horizon == pattern.horizon, "BinSpec horizon differs from the pattern's");
    ObservedData data;
    data.spec = spec;
    data.L = std::max(spec.process_count(), pattern.process_count());
    require(spec.process_count() >= pattern.process_count(),
            "BinSpec covers fewer processes than the pattern");
    data.horizon = pattern.horizon;
    data.window = pattern.window;
    for (const auto& e : pattern.events) {
        const ProcessBins& pb = spec.per_process[e.process];
        EventSlot slot;
        slot.process = e.process;
        if (pb.dt > 0.0) {
            int b = spec.time_bin_of(e.process, e.t);
            std::tie(slot.t_lo, slot.t_hi) = spec.time_bin_bounds(e.process, b);
        } else {
            slot.t_lo = slot.t_hi = e.t;
        }
        slot.has_location = pattern.spatial();
        if (pattern.spatial()) {
            require(pb.ds.has_value(),
                    "spatial pattern needs ds per process (0 keeps locations exact); strip "
                    "locations first to fit a temporal model");
            if (*pb.ds > 0.0) {
                require(spec.window->contains(*e.s),
                        "event outside the window cannot be assigned a spatial cell");
                auto [cx, cy] = spec.cell_of(e.process, *e.s);
                slot.cell = spec.cell_bounds(e.process, cx, cy);
            } else {
                slot.cell = {e.s->x, e.s->y, e.s->x, e.s->y};
            }
        } else {
            require(!pb.ds.has_value(), "spatial bins given for a temporal pattern");
        }
        data.slots.push_back(slot);
    }
    return data;
}

ObservedData ObservedData::from_exact(const EventPattern& pattern) {
    BinSpec spec;
    int L = std::max(pattern.process_count(), 1);
    spec.per_process.assign(L, ProcessBins{0.0, pattern.spatial()
                                                    ? std::optional<double>(0.0)
                                                    : std::nullopt});
    spec.horizon = pattern.horizon;
    spec.window = pattern.window;
    return from_pattern(pattern, spec);
}

// --- ChainState helpers ----------------------------------------------------

void ChainState::rebuild_children() {
    for (auto& c : children) c.clear();
    for (size_t i = 0; i < parent.size(); ++i)
        if (parent[i] != kImmigrant) children[parent[i]].push_back(static_cast<int>(i));
}

EventPattern ChainState::latent_pattern() const {
    std::vector<Event> events(size());
    for (size_t i = 0; i < size(); ++i) {
        events[i].process = proc[i];
        events[i].t = t[i];
        if (spatial) events[i].s = s[i];
    }
    EventPattern p;
    p.events = std::move(events);
    p.horizon = horizon;
    p.window = window;
    std::stable_sort(p.events.begin(), p.events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return p;
}

void ChainState::check_consistency() const {
    for (size_t i = 0; i < size(); ++i) {
        bool ok_t = (t_lo[i] == t_hi[i]) ? t[i] == t_lo[i]
                                         : (t[i] >= t_lo[i] && t[i] < t_hi[i]);
        if (!ok_t) throw std::logic_error("latent time escaped its bin");
        if (spatial) {
            const Window& c = cell[i];
            bool ok_s = (c.x0 == c.x1) ? (s[i].x == c.x0 && s[i].y == c.y0) : c.contains(s[i]);
            if (!ok_s) throw std::logic_error("latent location escaped its cell");
        }
        int p = parent[i];
        if (p != kImmigrant) {
            if (p < 0 || static_cast<size_t>(p) >= size() || !(t[p] < t[i]))
                throw std::logic_error("invalid branching structure");
        }
    }
}

// --- initialization --------------------------------------------------------

namespace {

// Starting parameters. The gamma priors here are diffuse (the rate prior has
// median ~69 at the defaults), and a kernel started orders of magnitude off
// the data scale strands the chain on the weak-identifiability ridge where
// same-bin pairs mimic near-instant excitation. Kernel parameters therefore
// start at the observed inter-event scale, over-dispersed by a log-uniform
// factor per chain; mu starts from its all-immigrant conditional and alpha
// from its truncated prior.
ModelParams initial_params(const ObservedData& data, const Priors& pr, TemporalFamily family,
                           Rng& rng) {
    const int L = data.L;
    const bool spatial = data.spatial();
    std::vector<int64_t> per_process(L, 0);
    for (const auto& slot : data.slots) ++per_process[slot.process];
    const int64_t n = static_cast<int64_t>(data.slots.size());
    const double gap = data.horizon / std::max<int64_t>(n, 1);

    ModelParams params;
    params.L = L;
    params.mu.resize(L);
    params.alpha = PairMatrix<double>(L, 0.5);
    params.temporal = PairMatrix<TemporalKernel>(L, TemporalKernel::exponential(1.0));
    if (spatial) params.spatial = PairMatrix<SpatialKernel>(L, SpatialKernel(1.0));
    for (int l = 0; l < L; ++l)
        params.mu[l] = rng.gamma(pr.mu_shape + per_process[l], pr.mu_rate + data.horizon);
    for (int m = 0; m < L; ++m)
        for (int l = 0; l < L; ++l)
            params.alpha(m, l) = sample_trunc_gamma01(pr.alpha_shape, pr.alpha_rate, rng);
    for (int m = 0; m < L; ++m)
        for (int l = 0; l < L; ++l) {
            if (family == TemporalFamily::Exponential) {
                double beta0 = std::exp(rng.uniform(-1.0, 1.0)) / gap;
                params.temporal(m, l) = TemporalKernel::exponential(beta0);
            } else {
                double p0 = 1.0 + 2.0 * std::exp(rng.uniform(-0.5, 0.5));
                double c0 = gap * std::max(p0 - 2.0, 0.3) * std::exp(rng.uniform(-0.5, 0.5));
                params.temporal(m, l) = TemporalKernel::lomax(c0, p0);
            }
        }
    if (spatial) {
        double cell = std::sqrt(data.window->area() / std::max<int64_t>(n, 1));
        for (int m = 0; m < L; ++m)
            for (int l = 0; l < L; ++l)
                (*params.spatial)(m, l) =
                    SpatialKernel(cell * std::exp(rng.uniform(-1.0, 1.0)));
    }
    return params;
}

// nearest earlier event across all processes, or kImmigrant when none exists
int nearest_earlier(const ChainState& st, int i) {
    int best = kImmigrant;
    double best_t = -1.0;
    for (size_t j = 0; j < st.size(); ++j) {
        if (static_cast<int>(j) == i) continue;
        if (st.t[j] < st.t[i] && st.t[j] > best_t) {
            best_t = st.t[j];
            best = static_cast<int>(j);
        }
    }
    return best;
}

}  // namespace

ChainState init_state(const ObservedData& data, const Priors& priors,
                      const SamplerConfig& config, Rng& rng) {
    priors.validate();
    config.validate();
    ChainState st;
    st.L = data.L;
    st.horizon = data.horizon;
    st.window = data.window;
    st.spatial = data.spatial();
    st.params = initial_params(data, priors, config.kernel_family, rng);

    // latent coordinates: uniform within each slot's box
    struct Drawn {
        EventSlot slot;
        double t;
        Vec2 s;
    };
    std::vector<Drawn> drawn;
    drawn.reserve(data.slots.size());
    for (const auto& slot : data.slots) {
        Drawn d;
        d.slot = slot;
        d.t = slot.exact_time() ? slot.t_lo : rng.uniform(slot.t_lo, slot.t_hi);
        if (slot.has_location)
            d.s = slot.exact_location() ? Vec2{slot.cell.x0, slot.cell.y0}
                                        : rng.uniform_in(slot.cell);
        drawn.push_back(d);
    }
    std::stable_sort(drawn.begin(), drawn.end(),
                     [](const Drawn& a, const Drawn& b) { return a.t < b.t; });

    const size_t n = drawn.size();
    st.proc.resize(n);
    st.t.resize(n);
    st.t_lo.resize(n);
    st.t_hi.resize(n);
    st.parent.assign(n, kImmigrant);
    st.children.resize(n);
    if (st.spatial) {
        st.s.resize(n);
        st.cell.resize(n);
    }
    for (size_t i = 0; i < n; ++i) {
        st.proc[i] = drawn[i].slot.process;
        st.t[i] = drawn[i].t;
        st.t_lo[i] = drawn[i].slot.t_lo;
        st.t_hi[i] = drawn[i].slot.t_hi;
        if (st.spatial) {
            st.s[i] = drawn[i].s;
            st.cell[i] = drawn[i].slot.cell;
        }
    }

    // fixed per-process bin index for candidate scans
    st.scan.assign(st.L, {});
    for (size_t i = 0; i < n; ++i) {
        auto& ps = st.scan[st.proc[i]];
        if (ps.lo.empty() || ps.lo.back() != st.t_lo[i] || ps.hi.back() != st.t_hi[i]) {
            ps.lo.push_back(st.t_lo[i]);
            ps.hi.push_back(st.t_hi[i]);
            ps.begin.push_back(static_cast<int>(ps.ids.size()));
        }
        ps.ids.push_back(static_cast<int>(i));
    }
    for (auto& ps : st.scan) ps.begin.push_back(static_cast<int>(ps.ids.size()));

    // random-walk scales: relative to the starting rate for the exponential
    // family, already scale-free for the Lomax log-coordinate walks
    st.sigma_rate.assign(static_cast<size_t>(st.L) * st.L, config.sigma_rate);
    st.sigma_rate2.assign(static_cast<size_t>(st.L) * st.L, config.sigma_rate);
    if (config.kernel_family == TemporalFamily::Exponential)
        for (int m = 0; m < st.L; ++m)
            for (int l = 0; l < st.L; ++l)
                st.sigma_rate[pair_index(m, l, st.L)] =
                    clamp_sigma(config.sigma_rate * st.params.temporal(m, l).beta());

    // all-immigrant start; events with zero immigrant density (outside the
    // window) must begin as offspring of some earlier event
    if (st.spatial) {
        for (size_t i = 0; i < n; ++i) {
            if (!st.window->contains(st.s[i])) {
                std::vector<int> cand;
                std::vector<double> lw;
                double lw0;
                detail::branching_weights(st, static_cast<int>(i), config.q_trunc, cand, lw, lw0);
                int pick = cand.empty() ? nearest_earlier(st, static_cast<int>(i))
                                        : cand[static_cast<size_t>(std::max_element(lw.begin(), lw.end()) -
                                                                    lw.begin())];
                require(pick != kImmigrant,
                        "event outside the window has no admissible parent; data are "
                        "inconsistent with the model");
                st.parent[i] = pick;
            }
        }
    }
    st.rebuild_children();
    return st;
}

// --- conjugate updates -----------------------------------------------------

double sample_trunc_gamma01(double shape, double rate, Rng& rng) {
    double mass = gammp(shape, rate);
    if (!(mass > 0.0))
        throw std::runtime_error("truncated gamma draw: no mass in (0,1)");
    double u = rng.uniform() * mass;
    double x = gammp_inv(shape, u) / rate;
    if (x > 0.0 && x < 1.0) return x;
    if (mass > 1e-3) {
        for (int tries = 0; tries < 100000; ++tries) {
            double y = rng.gamma(shape, rate);
            if (y < 1.0 && y > 0.0) return y;
        }
    }
    return std::min(std::max(x, std::numeric_limits<double>::min()),
                    1.0 - std::numeric_limits<double>::epsilon());
}

void update_conjugate(ChainState& st, const Priors& pr, Rng& rng) {
    const int L = st.L;
    const double T = st.horizon;
    const size_t n = st.size();

    std::vector<int64_t> immigrants(L, 0);
    for (size_t i = 0; i < n; ++i)
        if (st.parent[i] == kImmigrant) ++immigrants[st.proc[i]];
    for (int l = 0; l < L; ++l)
        st.params.mu[l] = rng.gamma(pr.mu_shape + immigrants[l], pr.mu_rate + T);

    std::vector<double> G_sum(static_cast<size_t>(L) * L, 0.0);
    std::vector<int64_t> links(static_cast<size_t>(L) * L, 0);
    std::vector<double> sq_sum(static_cast<size_t>(L) * L, 0.0);
    for (size_t i = 0; i < n; ++i) {
        int m = st.proc[i];
        for (int l = 0; l < L; ++l)
            G_sum[pair_index(m, l, L)] += st.params.temporal(m, l).cdf(T - st.t[i]);
        for (int k : st.children[i]) {
            int l = st.proc[k];
            ++links[pair_index(m, l, L)];
            if (st.spatial) sq_sum[pair_index(m, l, L)] += 0.5 * squared_norm(st.s[k] - st.s[i]);
        }
    }
    for (int m = 0; m < L; ++m)
        for (int l = 0; l < L; ++l) {
            int idx = pair_index(m, l, L);
            st.params.alpha(m, l) = sample_trunc_gamma01(pr.alpha_shape + links[idx],
                                                         pr.alpha_rate + G_sum[idx], rng);
            if (st.spatial) {
                double g2 = (pr.gamma_sq_rate + sq_sum[idx]) /
                            rng.gamma(pr.gamma_sq_shape + links[idx], 1.0);
                (*st.params.spatial)(m, l) = SpatialKernel(std::sqrt(g2));
            }
        }
}

// --- branching update ------------------------------------------------------

namespace detail {

void branching_weights(const ChainState& st, int i, double q_trunc,
                       std::vector<int>& candidates, std::vector<double>& log_w,
                       double& log_w0) {
    candidates.clear();
    log_w.clear();
    const int l = st.proc[i];
    const double ti = st.t[i];

    log_w0 = std::log(st.params.mu[l]);
    if (st.spatial)
        log_w0 += st.window->contains(st.s[i]) ? -std::log(st.window->area()) : kNegInf;

    for (int m = 0; m < st.L; ++m) {
        const TemporalKernel& kern = st.params.temporal(m, l);
        const double Q = kern.quantile(q_trunc);
        const double la = std::log(st.params.alpha(m, l));
        st.for_candidates(m, ti - Q, ti, [&](int j) {
            double lw = la + kern.log_density(ti - st.t[j]);
            if (st.spatial) lw += (*st.params.spatial)(m, l).log_density(st.s[i] - st.s[j]);
            candidates.push_back(j);
            log_w.push_back(lw);
        });
    }
}

}  // namespace detail

void update_branching(ChainState& st, const SamplerConfig& config, Rng& rng) {
    std::vector<int> cand;
    std::vector<double> lw;
    for (size_t i = 0; i < st.size(); ++i) {
        double lw0;
        detail::branching_weights(st, static_cast<int>(i), config.q_trunc, cand, lw, lw0);
        double mx = lw0;
        for (double v : lw) mx = std::max(mx, v);
        if (!(mx > kNegInf)) {
            // degenerate conditional: every weight underflowed or the event
            // sits outside the window with no candidate in the scan range
            int j = nearest_earlier(st, static_cast<int>(i));
            require(j != kImmigrant, "no admissible parent for an event outside the window");
            st.parent[i] = j;
            continue;
        }
        double total = std::exp(lw0 - mx);
        for (double& v : lw) {
            v = std::exp(v - mx);
            total += v;
        }
        double u = rng.uniform() * total;
        double acc = std::exp(lw0 - mx);
        int pick = kImmigrant;
        if (u >= acc) {
            for (size_t k = 0; k < cand.size(); ++k) {
                acc += lw[k];
                if (u < acc) {
                    pick = cand[k];
                    break;
                }
            }
            if (pick == kImmigrant && !cand.empty() && lw0 == kNegInf) pick = cand.back();
        }
        st.parent[i] = pick;
    }
    st.rebuild_children();
}

// --- rate parameter Metropolis-Hastings -------------------------------------

namespace detail {

double rate_move_log_ratio(const ChainState& st, int m, int l,
                           const TemporalKernel& proposed) {
    const TemporalKernel& cur = st.params.temporal(m, l);
    const double a = st.params.alpha(m, l);
    const double T = st.horizon;
    long double d = 0.0;
    for (size_t i = 0; i < st.size(); ++i) {
        if (st.proc[i] != m) continue;
        d -= a * (proposed.cdf(T - st.t[i]) - cur.cdf(T - st.t[i]));
        for (int k : st.children[i]) {
            if (st.proc[k] != l) continue;
            double dt = st.t[k] - st.t[i];
            d += proposed.log_density(dt) - cur.log_density(dt);
        }
    }
    return static_cast<double>(d);
}

}  // namespace detail

namespace {

// one Metropolis step shared by the exponential and both Lomax coordinates;
// returns the realized acceptance probability
double rate_step(ChainState& st, int m, int l, const TemporalKernel& proposed,
                 double log_prior_ratio, Rng& rng) {
    double log_ratio = detail::rate_move_log_ratio(st, m, l, proposed) + log_prior_ratio;
    double p_acc = std::min(1.0, std::exp(log_ratio));
    if (rng.uniform() < p_acc) st.params.temporal(m, l) = proposed;
    return p_acc;
}

void adapt_scale(double& sigma, double p_acc, double target, int64_t step) {
    double c = std::pow(static_cast<double>(std::max<int64_t>(step, 1)), -0.6);
    sigma = clamp_sigma(sigma * std::exp(c * (p_acc - target)));
}

}  // namespace

void update_rate_mh(ChainState& st, const Priors& pr, const SamplerConfig& config, Rng& rng,
                    bool adapt) {
    AcceptanceReport& rep = st.in_burnin ? st.accept_adapt : st.accept_sample;
    ++st.adapt_step;
    for (int m = 0; m < st.L; ++m)
        for (int l = 0; l < st.L; ++l) {
            const int idx = pair_index(m, l, st.L);
            const TemporalKernel cur = st.params.temporal(m, l);
            if (config.kernel_family == TemporalFamily::Exponential) {
                double beta = cur.beta();
                double prop = beta + st.sigma_rate[idx] * rng.normal();
                double p_acc = 0.0;
                ++rep.rate_mh.proposed;
                if (prop > 0.0) {
                    double lpr = (pr.rate_shape - 1.0) * std::log(prop / beta) -
                                 pr.rate_rate * (prop - beta);
                    p_acc = rate_step(st, m, l, TemporalKernel::exponential(prop), lpr, rng);
                }
                if (st.params.temporal(m, l).beta() != beta) ++rep.rate_mh.accepted;
                if (adapt) adapt_scale(st.sigma_rate[idx], p_acc, config.target_accept, st.adapt_step);
            } else {
                // log c walk, then log(p-1) walk, each with the Jacobian folded
                // into the prior ratio
                double c = cur.lomax_c(), p = cur.lomax_p();
                double c_prop = c * std::exp(st.sigma_rate[idx] * rng.normal());
                double lpr_c = pr.lomax_c_shape * std::log(c_prop / c) -
                               pr.lomax_c_rate * (c_prop - c);
                ++rep.rate_mh.proposed;
                double p_acc = rate_step(st, m, l, TemporalKernel::lomax(c_prop, p), lpr_c, rng);
                if (st.params.temporal(m, l).lomax_c() != c) ++rep.rate_mh.accepted;
                if (adapt) adapt_scale(st.sigma_rate[idx], p_acc, config.target_accept, st.adapt_step);

                c = st.params.temporal(m, l).lomax_c();
                double v = p - 1.0;
                double v_prop = v * std::exp(st.sigma_rate2[idx] * rng.normal());
                double lpr_p = pr.lomax_pm1_shape * std::log(v_prop / v) -
                               pr.lomax_pm1_rate * (v_prop - v);
                ++rep.rate_mh.proposed;
                p_acc = rate_step(st, m, l, TemporalKernel::lomax(c, 1.0 + v_prop), lpr_p, rng);
                if (st.params.temporal(m, l).lomax_p() != p) ++rep.rate_mh.accepted;
                if (adapt) adapt_scale(st.sigma_rate2[idx], p_acc, config.target_accept, st.adapt_step);
            }
        }
}

// --- latent updates ---------------------------------------------------------

namespace detail {

double time_move_log_ratio(const ChainState& st, int i, double t_new) {
    const int m = st.proc[i];
    const double tc = st.t[i];
    const double T = st.horizon;
    long double d = 0.0;
    for (int l = 0; l < st.L; ++l) {
        const TemporalKernel& kern = st.params.temporal(m, l);
        d -= st.params.alpha(m, l) * cdf_diff(kern, T - t_new, T - tc);
    }
    if (st.parent[i] != kImmigrant) {
        int q = st.parent[i];
        const TemporalKernel& kern = st.params.temporal(st.proc[q], m);
        d += kern.log_density(t_new - st.t[q]) - kern.log_density(tc - st.t[q]);
    }
    for (int k : st.children[i]) {
        const TemporalKernel& kern = st.params.temporal(m, st.proc[k]);
        d += kern.log_density(st.t[k] - t_new) - kern.log_density(st.t[k] - tc);
    }
    return static_cast<double>(d);
}

double location_move_log_ratio(const ChainState& st, int i, Vec2 s_new) {
    const int m = st.proc[i];
    const Vec2 sc = st.s[i];
    long double d = 0.0;
    if (st.parent[i] != kImmigrant) {
        int q = st.parent[i];
        const SpatialKernel& kern = (*st.params.spatial)(st.proc[q], m);
        d += kern.log_density(s_new - st.s[q]) - kern.log_density(sc - st.s[q]);
    }
    for (int k : st.children[i]) {
        const SpatialKernel& kern = (*st.params.spatial)(m, st.proc[k]);
        d += kern.log_density(st.s[k] - s_new) - kern.log_density(st.s[k] - sc);
    }
    return static_cast<double>(d);
}

}  // namespace detail

namespace {

// admissible interval for event i's time given its bin, parent, and offspring
std::pair<double, double> time_interval(const ChainState& st, int i) {
    double lo = st.t_lo[i];
    double hi = st.t_hi[i];
    if (st.parent[i] != kImmigrant) lo = std::max(lo, st.t[st.parent[i]]);
    for (int k : st.children[i]) hi = std::min(hi, st.t[k]);
    return {lo, hi};
}

void move_time_one(ChainState& st, int i, MoveStats& stats, Rng& rng) {
    if (st.t_lo[i] == st.t_hi[i]) return;
    auto [lo, hi] = time_interval(st, i);
    if (!(hi > lo)) {
        ++stats.skipped;
        return;
    }
    ++stats.proposed;
    double t_new = rng.uniform(lo, hi);
    double log_ratio = detail::time_move_log_ratio(st, i, t_new);
    if (metropolis_accept(log_ratio, rng)) {
        st.t[i] = t_new;
        ++stats.accepted;
    }
}

void move_location_one(ChainState& st, int i, MoveStats& stats, Rng& rng) {
    const Window& c = st.cell[i];
    if (c.x0 == c.x1) return;
    ++stats.proposed;
    Vec2 s_new = rng.uniform_in(c);
    double log_ratio = detail::location_move_log_ratio(st, i, s_new);
    if (metropolis_accept(log_ratio, rng)) {
        st.s[i] = s_new;
        ++stats.accepted;
    }
}

std::vector<int> time_order(const ChainState& st) {
    std::vector<int> order(st.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return st.t[a] < st.t[b]; });
    return order;
}

void update_times_one_at_a_time(ChainState& st, MoveStats& stats, Rng& rng) {
    for (int i : time_order(st)) move_time_one(st, i, stats, rng);
}

void update_times_by_generation(ChainState& st, MoveStats& stats, Rng& rng) {
    const std::vector<int> order = time_order(st);
    std::vector<int> gen(st.size(), 0);
    int max_gen = 0;
    for (int i : order) {
        gen[i] = st.parent[i] == kImmigrant ? 0 : gen[st.parent[i]] + 1;
        max_gen = std::max(max_gen, gen[i]);
    }
    std::vector<std::vector<int>> groups(max_gen + 1);
    for (int i : order) groups[gen[i]].push_back(i);

    std::vector<std::pair<int, double>> proposal;
    for (const auto& group : groups) {
        proposal.clear();
        long double log_ratio = 0.0;
        for (int i : group) {
            if (st.t_lo[i] == st.t_hi[i]) continue;
            auto [lo, hi] = time_interval(st, i);
            if (!(hi > lo)) {
                ++stats.skipped;
                continue;
            }
            double t_new = rng.uniform(lo, hi);
            log_ratio += detail::time_move_log_ratio(st, i, t_new);
            proposal.emplace_back(i, t_new);
        }
        if (proposal.empty()) continue;
        stats.proposed += static_cast<int64_t>(proposal.size());
        if (metropolis_accept(static_cast<double>(log_ratio), rng)) {
            for (auto [i, t_new] : proposal) st.t[i] = t_new;
            stats.accepted += static_cast<int64_t>(proposal.size());
        }
    }
}

// Cluster proposal: root uniform on its bin, every descendant's lag from the
// kernel truncated to its own bin; an independence proposal whose kernel
// factors cancel against the target, leaving compensator and truncation-mass
// ratios.
void update_times_by_cluster(ChainState& st, MoveStats& block_stats, Rng& rng) {
    const std::vector<int> order = time_order(st);
    std::vector<int> members;
    std::vector<double> t_new(st.size());
    for (int root : order) {
        if (st.parent[root] != kImmigrant) continue;
        members.clear();
        members.push_back(root);
        for (size_t q = 0; q < members.size(); ++q)
            for (int k : st.children[members[q]]) members.push_back(k);
        bool any_movable = false;
        for (int i : members)
            if (st.t_lo[i] != st.t_hi[i]) any_movable = true;
        if (!any_movable) continue;

        ++block_stats.proposed;
        long double log_ratio = 0.0;
        const double T = st.horizon;
        bool feasible = true;
        for (int i : members) {
            const int m = st.proc[i];
            const int pa = st.parent[i];
            // exact children bound every proposal from above
            double hi = st.t_hi[i];
            for (int k : st.children[i])
                if (st.t_lo[k] == st.t_hi[k]) hi = std::min(hi, st.t[k]);

            if (st.t_lo[i] == st.t_hi[i]) {
                t_new[i] = st.t[i];
                // the lag to an exact child of a moved parent still changes
                if (pa != kImmigrant && st.t_lo[pa] != st.t_hi[pa]) {
                    const TemporalKernel& kern = st.params.temporal(st.proc[pa], m);
                    if (!(t_new[pa] < st.t[i])) {
                        feasible = false;
                        break;
                    }
                    log_ratio += kern.log_density(st.t[i] - t_new[pa]) -
                                 kern.log_density(st.t[i] - st.t[pa]);
                }
                continue;
            }

            double lo = st.t_lo[i];
            if (pa == kImmigrant) {
                if (!(hi > lo)) {
                    feasible = false;
                    break;
                }
                t_new[i] = rng.uniform(lo, hi);
                // interval depends only on fixed quantities; proposal cancels
            } else {
                const TemporalKernel& kern = st.params.temporal(st.proc[pa], m);
                double lag_lo_new = std::max(0.0, lo - t_new[pa]);
                double lag_hi_new = hi - t_new[pa];
                double lag_lo_cur = std::max(0.0, lo - st.t[pa]);
                double lag_hi_cur = hi - st.t[pa];
                if (!(lag_hi_new > lag_lo_new) || !(lag_hi_cur > lag_lo_cur)) {
                    feasible = false;
                    break;
                }
                double mass_new = kern.cdf_between(lag_lo_new, lag_hi_new);
                double mass_cur = kern.cdf_between(lag_lo_cur, lag_hi_cur);
                if (!(mass_new > 0.0) || !(mass_cur > 0.0)) {
                    feasible = false;
                    break;
                }
                t_new[i] = t_new[pa] + kern.sample_truncated(lag_lo_new, lag_hi_new, rng);
                log_ratio += std::log(mass_new) - std::log(mass_cur);
            }
            const int mi = st.proc[i];
            for (int l = 0; l < st.L; ++l) {
                const TemporalKernel& kern = st.params.temporal(mi, l);
                log_ratio -= st.params.alpha(mi, l) * cdf_diff(kern, T - t_new[i], T - st.t[i]);
            }
        }
        if (!feasible) {
            ++block_stats.skipped;
            continue;
        }
        if (metropolis_accept(static_cast<double>(log_ratio), rng)) {
            for (int i : members) st.t[i] = t_new[i];
            ++block_stats.accepted;
        }
    }
}

}  // namespace

void update_latent(ChainState& st, const SamplerConfig& config, Rng& rng) {
    AcceptanceReport& report = st.in_burnin ? st.accept_adapt : st.accept_sample;
    switch (config.strategy) {
        case LatentStrategy::OneAtATime:
            update_times_one_at_a_time(st, report.latent_time, rng);
            break;
        case LatentStrategy::ByGeneration:
            update_times_by_generation(st, report.latent_time, rng);
            break;
        case LatentStrategy::ByCluster:
            update_times_by_cluster(st, report.cluster_block, rng);
            break;
    }
    if (st.spatial)
        for (int i : time_order(st)) move_location_one(st, i, report.latent_location, rng);
}

// --- recording and chain driver ---------------------------------------------

std::vector<std::string> param_names(const ModelParams& params, TemporalFamily family) {
    std::vector<std::string> names;
    const int L = params.L;
    auto pair_suffix = [L](int m, int l) {
        return L == 1 ? std::string{} : "_" + std::to_string(m + 1) + "_" + std::to_string(l + 1);
    };
    for (int l = 0; l < L; ++l)
        names.push_back(L == 1 ? "mu" : "mu_" + std::to_string(l + 1));
    for (int m = 0; m < L; ++m)
        for (int l = 0; l < L; ++l) names.push_back("alpha" + pair_suffix(m, l));
    for (int m = 0; m < L; ++m)
        for (int l = 0; l < L; ++l) {
            if (family == TemporalFamily::Exponential) {
                names.push_back("beta" + pair_suffix(m, l));
            } else {
                names.push_back("c" + pair_suffix(m, l));
                names.push_back("p" + pair_suffix(m, l));
                names.push_back("lomax_median" + pair_suffix(m, l));
                names.push_back("lomax_mean" + pair_suffix(m, l));
            }
        }
    if (params.is_spatial())
        for (int m = 0; m < L; ++m)
            for (int l = 0; l < L; ++l) names.push_back("gamma" + pair_suffix(m, l));
    return names;
}

std::vector<double> param_values(const ModelParams& params, TemporalFamily family) {
    std::vector<double> v;
    const int L = params.L;
    for (int l = 0; l < L; ++l) v.push_back(params.mu[l]);
    for (int m = 0; m < L; ++m)
        for (int l = 0; l < L; ++l) v.push_back(params.alpha(m, l));
    for (int m = 0; m < L; ++m)
        for (int l = 0; l < L; ++l) {
            const TemporalKernel& k = params.temporal(m, l);
            if (family == TemporalFamily::Exponential) {
                v.push_back(k.beta());
            } else {
                v.push_back(k.lomax_c());
                v.push_back(k.lomax_p());
                v.push_back(k.median());
                v.push_back(k.mean());
            }
        }
    if (params.is_spatial())
        for (int m = 0; m < L; ++m)
            for (int l = 0; l < L; ++l) v.push_back((*params.spatial)(m, l).gamma());
    return v;
}

int PosteriorSamples::column(const std::string& name) const {
    for (size_t c = 0; c < param_names.size(); ++c)
        if (param_names[c] == name) return static_cast<int>(c);
    throw std::invalid_argument("unknown parameter name: " + name);
}

std::vector<double> PosteriorSamples::chain_column(int chain, const std::string& name) const {
    int col = column(name);
    std::vector<double> out;
    out.reserve(rows(chain));
    for (size_t r = 0; r < rows(chain); ++r) out.push_back(value(chain, r, col));
    return out;
}

std::vector<double> PosteriorSamples::pooled(const std::string& name) const {
    std::vector<double> out;
    for (int ch = 0; ch < chain_count(); ++ch) {
        auto v = chain_column(ch, name);
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

PosteriorSamples run_chain(const ObservedData& data, const Priors& priors,
                           const SamplerConfig& config, int chain_id) {
    config.validate();
    Rng rng = Rng(config.seed).derive(kChainStream, static_cast<uint64_t>(chain_id));
    ChainState st = init_state(data, priors, config, rng);

    PosteriorSamples out;
    out.param_names = param_names(st.params, config.kernel_family);
    out.draws.resize(1);
    out.iterations.resize(1);
    out.snapshots.resize(1);

    auto start = std::chrono::steady_clock::now();
    int64_t recorded = 0;
    for (int iter = 1; iter <= config.iterations; ++iter) {
        st.in_burnin = iter <= config.burnin;
        update_latent(st, config, rng);
        update_branching(st, config, rng);
        update_conjugate(st, priors, rng);
        update_rate_mh(st, priors, config, rng, iter <= config.burnin);
#ifndef NDEBUG
        st.check_consistency();
#else
        if (iter % 100 == 0) st.check_consistency();
#endif
        if (iter > config.burnin && (iter - config.burnin) % config.thin == 0) {
            auto row = param_values(st.params, config.kernel_family);
            out.draws[0].insert(out.draws[0].end(), row.begin(), row.end());
            out.iterations[0].push_back(iter);
            if (config.record_latent && recorded % config.snapshot_stride == 0)
                out.snapshots[0].push_back({st.params, st.latent_pattern()});
            ++recorded;
        }
    }
    out.chain_seconds = {std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                             .count()};
    out.acceptance = st.accept_sample;
    return out;
}

PosteriorSamples run_sampler(const ObservedData& data, const Priors& priors,
                             const SamplerConfig& config, int jobs) {
    config.validate();
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min(jobs, config.chains));

    std::vector<PosteriorSamples> per_chain(config.chains);
    std::vector<std::exception_ptr> errors(config.chains);
    std::atomic<int> next{0};
    auto worker = [&] {
        while (true) {
            int ch = next.fetch_add(1);
            if (ch >= config.chains) return;
            try {
                per_chain[ch] = run_chain(data, priors, config, ch);
            } catch (...) {
                errors[ch] = std::current_exception();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    PosteriorSamples merged = std::move(per_chain[0]);
    for (int ch = 1; ch < config.chains; ++ch) {
        merged.draws.push_back(std::move(per_chain[ch].draws[0]));
        merged.iterations.push_back(std::move(per_chain[ch].iterations[0]));
        merged.snapshots.push_back(std::move(per_chain[ch].snapshots[0]));
        merged.chain_seconds.push_back(per_chain[ch].chain_seconds[0]);
        merged.acceptance += per_chain[ch].acceptance;
    }
    return merged;
}

}  // namespace hawkes::mcmc
