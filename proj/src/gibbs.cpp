#include "gammagibbs/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace gammagibbs {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) { return Rng(seed, 0).split(k).engine()(); }

std::pair<int, bool> transition(ChainState& st, LocalEnergy& energy, const ChainConfig& cfg, double nu,
                                double log_birth_ratio, Rng& rng) {
    auto accept = [&](double log_a) { return log_a >= 0.0 || rng.uniform() < std::exp(log_a); };
    const double u = rng.uniform();
    const std::size_t n = st.eta.size();
    int kind;
    bool ok = false;
    if (u < cfg.move_mix.birth) {
        kind = 0;
        ++st.birth.proposed;
        Birth b{std::vector<double>(static_cast<std::size_t>(cfg.window.dimension())), 0.0};
        cfg.window.sample_point(rng, b.x);
        b.s = sample_mark(cfg.levy, rng);
        const Move mv{std::move(b)};
        const double dh = energy.increment(st.eta, mv);
        if (accept(std::log(nu / static_cast<double>(n + 1)) - dh + log_birth_ratio)) {
            energy.apply(st.eta, mv);
            st.energy += dh;
            ++st.birth.accepted;
            ok = true;
        }
    } else if (u < cfg.move_mix.birth + cfg.move_mix.death) {
        kind = 1;
        ++st.death.proposed;
        if (n > 0) {
            const Move mv{Death{rng.index(n)}};
            const double dh = energy.increment(st.eta, mv);
            if (accept(std::log(static_cast<double>(n) / nu) - dh - log_birth_ratio)) {
                energy.apply(st.eta, mv);
                st.energy += dh;
                ++st.death.accepted;
                ok = true;
            }
        }
    } else {
        kind = 2;
        ++st.resize.proposed;
        if (n > 0) {
            const std::size_t id = rng.index(n);
            const Move mv{Resize{id, sample_mark(cfg.levy, rng)}};
            const double dh = energy.increment(st.eta, mv);
            if (accept(-dh)) {
                energy.apply(st.eta, mv);
                st.energy += dh;
                ++st.resize.accepted;
                ok = true;
            }
        }
    }
    ++st.step;
    return {kind, ok};
}

double log_ratio(const MoveMix& m) {
    if (m.birth == 0.0 && m.death == 0.0) return 0.0;
    return std::log(m.death / m.birth);
}

}  // namespace

ChainConfig::ChainConfig(LevySpec levy_, PotentialSpec potential_, Window window_, DiscreteMeasure boundary_)
    : levy(std::move(levy_)), potential(std::move(potential_)), window(std::move(window_)), boundary(std::move(boundary_)) {}

void ChainConfig::validate() const {
    const auto& m = move_mix;
    for (double p : {m.birth, m.death, m.resize})
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("move_mix: probabilities must lie in [0, 1]");
    if (std::abs(m.birth + m.death + m.resize - 1.0) > 1e-12)
        throw std::invalid_argument("move_mix: probabilities must sum to 1");
    if ((m.birth > 0.0) != (m.death > 0.0))
        throw std::invalid_argument("move_mix: birth and death must both be enabled or both disabled");
    if (n_steps == 0) throw std::invalid_argument("n_steps must be positive");
    if (!(burn_in < n_steps)) throw std::invalid_argument("burn_in must be smaller than n_steps");
    if (thinning == 0) throw std::invalid_argument("thinning must be positive");
    if (window.empty()) throw std::invalid_argument("chain window is empty");
    if (window.dimension() != potential.grid.dimension())
        throw std::invalid_argument("chain window and potential grid differ in dimension");
    if (!(levy.trunc() > 0.0)) throw std::invalid_argument("chain needs a positive truncation threshold");
}

GibbsChain::GibbsChain(ChainConfig config, std::optional<DiscreteMeasure> initial)
    : config_(std::move(config)),
      rng_(config_.seed, 0),
      energy_(config_.potential, config_.window, config_.boundary),
      nu_(0.0),
      log_birth_ratio_(log_ratio(config_.move_mix)) {
    config_.validate();
    nu_ = truncated_mass(config_.levy) * config_.window.volume();
    state_.eta = DiscreteMeasure(config_.window.dimension(), config_.window);
    if (initial) {
        std::vector<double> x(static_cast<std::size_t>(config_.window.dimension()));
        for (std::size_t i = 0; i < initial->size(); ++i) {
            initial->position(i, x);
            if (!config_.window.contains(x)) throw std::invalid_argument("initial state has atoms outside the window");
            state_.eta.add(x, initial->mark(i));
        }
    }
    energy_.reset(state_.eta);
    state_.energy = energy_.hamiltonian(state_.eta);
}

std::pair<int, bool> GibbsChain::step_detailed() {
    auto r = transition(state_, energy_, config_, nu_, log_birth_ratio_, rng_);
    if (config_.audit_every && state_.step % config_.audit_every == 0) audit();
    return r;
}

void GibbsChain::step() { step_detailed(); }

void GibbsChain::audit() {
    const double fresh = energy_.hamiltonian(state_.eta);
    const double err = std::abs(state_.energy - fresh) / std::max(std::abs(fresh), 1.0);
    ++audit_.audits;
    audit_.max_relative_error = std::max(audit_.max_relative_error, err);
    if (err > kAuditTolerance) {
        audit_.passed = false;
        throw EnergyAuditError("cached energy " + std::to_string(state_.energy) + " differs from recomputed " +
                               std::to_string(fresh) + " at step " + std::to_string(state_.step));
    }
    state_.energy = fresh;
}

ChainState mh_step(const ChainState& state, const ChainConfig& config, Rng& rng) {
    config.validate();
    ChainState next = state;
    LocalEnergy energy(config.potential, config.window, config.boundary);
    energy.reset(next.eta);
    const double nu = truncated_mass(config.levy) * config.window.volume();
    transition(next, energy, config, nu, log_ratio(config.move_mix), rng);
    return next;
}

// ---------------------------------------------------------------------------

namespace {

FluxReport flux_report(const std::vector<double>& trajectory, const std::vector<double>& retained) {
    FluxReport f;
    if (retained.size() < 8) return f;
    std::vector<double> sorted = retained;
    std::sort(sorted.begin(), sorted.end());
    for (double q : {0.25, 0.5, 0.75}) {
        const double e = sorted[static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1))];
        if (f.bin_edges.empty() || e > f.bin_edges.back()) f.bin_edges.push_back(e);
    }
    const std::size_t nb = f.bin_edges.size() + 1;
    f.counts.assign(nb, std::vector<std::uint64_t>(nb, 0));
    auto bin = [&](double m) {
        return static_cast<std::size_t>(std::upper_bound(f.bin_edges.begin(), f.bin_edges.end(), m) - f.bin_edges.begin());
    };
    for (std::size_t t = 1; t < trajectory.size(); ++t) {
        const auto a = bin(trajectory[t - 1]), b = bin(trajectory[t]);
        if (a != b) ++f.counts[a][b];
    }
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t b = a + 1; b < nb; ++b) {
            const double up = static_cast<double>(f.counts[a][b]), down = static_cast<double>(f.counts[b][a]);
            if (up + down > 0.0) f.max_abs_z = std::max(f.max_abs_z, std::abs(up - down) / std::sqrt(up + down));
        }
    f.symmetric = f.max_abs_z <= 4.0;
    return f;
}

}  // namespace

SpecificationRun run_specification(const ChainConfig& config, std::optional<DiscreteMeasure> initial) {
    GibbsChain chain(config, std::move(initial));
    const auto& spec = config.potential;
    const bool check = config.check_stability && spec.certified && spec.include_diagonal;
    const IndexHull hull = index_hull(config.window, spec.grid);

    SpecificationRun out;
    auto& diag = out.diagnostics;
    std::vector<double> trajectory, retained_mass;
    trajectory.reserve(config.n_steps - config.burn_in);
    double support_sum = 0.0;

    for (std::uint64_t t = 1; t <= config.n_steps; ++t) {
        chain.step();
        if (t <= config.burn_in) continue;
        const DiscreteMeasure& eta = chain.state().eta;
        const double mass = eta.total_mass();
        trajectory.push_back(mass);
        if ((t - config.burn_in) % config.thinning != 0) continue;

        retained_mass.push_back(mass);
        out.samples.push_back(eta);
        if (check) {
            const double bound = stability_lower_bound(eta, chain.energy().boundary(), config.window, spec);
            const double h = chain.state().energy;
            ++diag.stability_checks;
            if (h < bound - 1e-12 * std::max({1.0, std::abs(h), std::abs(bound)})) {
                ++diag.stability_violations;
                throw StabilityViolation("H = " + std::to_string(h) + " below the stability bound " +
                                             std::to_string(bound) + " at step " + std::to_string(t),
                                         eta);
            }
        }
        if (!hull.interior.empty()) {
            std::size_t above = 0;
            for (const auto& k : hull.interior) {
                const double m = eta.mass_in_cube(k, spec.grid);
                if (m * m > config.support_b_log * std::log1p(k.norm())) ++above;
            }
            support_sum += static_cast<double>(above) / static_cast<double>(hull.interior.size());
        }
    }
    chain.audit();

    diag.birth = chain.state().birth;
    diag.death = chain.state().death;
    diag.resize = chain.state().resize;
    diag.audit = chain.audit_summary();
    diag.retained = out.samples.size();
    diag.ess_mass = effective_sample_size(retained_mass);
    diag.flux = flux_report(trajectory, retained_mass);
    diag.support_fraction = out.samples.empty() ? 0.0 : support_sum / static_cast<double>(out.samples.size());
    return out;
}

Estimate estimate_partition_function(const Window& window, const DiscreteMeasure& xi, const PotentialSpec& spec,
                                     const LevySpec& levy, std::size_t n_samples, Rng& rng) {
    if (n_samples == 0) throw std::invalid_argument("estimate_partition_function: n_samples must be positive");
    LocalEnergy energy(spec, window, xi);
    std::vector<double> w(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const DiscreteMeasure eta = sample_gamma_measure(levy, window, rng);
        energy.reset(eta);
        w[i] = std::exp(-energy.hamiltonian(eta));
    }
    const Estimate z = iid_estimate(w);
    if (!(z.mean > 0.0)) throw std::logic_error("partition function estimate is not positive");
    if (spec.b == 0.0 && spec.potential.family() != PotentialFamily::Custom && z.mean > 1.0 + 3.0 * z.se())
        throw std::logic_error("partition function estimate exceeds 1 + 3 SE for a nonnegative potential");
    if (spec.b > 0.0) {
        const double top = *std::max_element(w.begin(), w.end());
        if (top > 0.05 * z.mean * static_cast<double>(n_samples))
            std::clog << "warning: partition function estimate dominated by a single sample (heavy-tailed weights)\n";
    }
    return z;
}

// ---------------------------------------------------------------------------

namespace {

void require_nested(const Window& small, const Window& big, const CubeGrid& grid) {
    if (!small.is_cube_aligned() || !big.is_cube_aligned())
        throw std::invalid_argument("nested windows must be cube-aligned");
    if (!(*small.grid() == grid) || !(*big.grid() == grid))
        throw std::invalid_argument("nested windows must use the potential's grid");
    if (!small.is_subset_of(big)) throw std::invalid_argument("windows are not nested");
}

}  // namespace

ConsistencyReport consistency_check(const Window& small, const Window& big, const DiscreteMeasure& xi,
                                    const ChainConfig& config, const ConsistencyOptions& options) {
    require_nested(small, big, config.potential.grid);
    const auto in_small = [&](std::span<const double> x) { return small.contains(x); };
    std::vector<LocalFunctional> panel{
        {"indicator_mass_le_c", [&](const DiscreteMeasure& e) { return e.mass_where(in_small) <= options.indicator_level ? 1.0 : 0.0; }},
        {"exp_neg_mass", [&](const DiscreteMeasure& e) { return std::exp(-e.mass_where(in_small)); }},
        {"mass_capped_10", [&](const DiscreteMeasure& e) { return std::min(e.mass_where(in_small), 10.0); }},
    };

    ChainConfig direct = config;
    direct.window = big;
    direct.boundary = xi;
    direct.seed = derive_seed(config.seed, 1);
    const auto run_a = run_specification(direct);

    ChainConfig outer = direct;
    outer.seed = derive_seed(config.seed, 2);
    outer.check_stability = false;
    const auto run_b = run_specification(outer);

    PotentialSpec inner_spec = config.potential;
    inner_spec.potential = inner_spec.potential.scaled(options.inner_energy_scale);
    const int d = big.dimension();
    std::vector<double> x(static_cast<std::size_t>(d));

    std::vector<std::vector<double>> va(panel.size()), vb(panel.size());
    for (const auto& e : run_a.samples)
        for (std::size_t f = 0; f < panel.size(); ++f) va[f].push_back(panel[f].f(e));

    const std::uint64_t inner_seed_base = derive_seed(config.seed, 3);
    for (std::size_t i = 0; i < run_b.samples.size(); ++i) {
        const DiscreteMeasure& e = run_b.samples[i];
        DiscreteMeasure boundary(d), start(d);
        for (std::size_t j = 0; j < xi.size(); ++j) {
            xi.position(j, x);
            if (!big.contains(x)) boundary.add(x, xi.mark(j));
        }
        for (std::size_t j = 0; j < e.size(); ++j) {
            e.position(j, x);
            if (small.contains(x))
                start.add(x, e.mark(j));
            else
                boundary.add(x, e.mark(j));
        }
        ChainConfig inner(config.levy, inner_spec, small, std::move(boundary));
        inner.move_mix = config.move_mix;
        inner.n_steps = options.inner_steps;
        inner.burn_in = 0;
        inner.thinning = 1;
        inner.audit_every = 0;
        inner.check_stability = false;
        inner.seed = Rng(inner_seed_base, i).engine()();
        GibbsChain chain(std::move(inner), std::move(start));
        for (std::uint64_t t = 0; t < options.inner_steps; ++t) chain.step();
        for (std::size_t f = 0; f < panel.size(); ++f) vb[f].push_back(panel[f].f(chain.state().eta));
    }

    ConsistencyReport rep;
    for (std::size_t f = 0; f < panel.size(); ++f) {
        ConsistencyLine line{panel[f].name, chain_estimate(va[f]), chain_estimate(vb[f]), 0.0};
        line.z = z_independent(line.direct, line.resampled);
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(line.z));
        rep.lines.push_back(std::move(line));
    }
    rep.pass = rep.max_abs_z <= 4.0;
    return rep;
}

Estimate exp_moment(const std::vector<DiscreteMeasure>& samples, double lambda, const CubeIndex& cube,
                    const CubeGrid& grid) {
    if (samples.empty()) throw std::invalid_argument("exp_moment: no samples");
    if (lambda == 0.0) {
        Estimate e = Estimate::exact(1.0);
        e.raw_n = samples.size();
        e.n_effective = static_cast<double>(samples.size());
        return e;
    }
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) {
        const double m = s.mass_in_cube(cube, grid);
        v.push_back(std::exp(lambda * m * m));
    }
    return chain_estimate(v);
}

SweepReport thermodynamic_sweep(const std::vector<Window>& windows, const DiscreteMeasure& xi, const ChainConfig& config,
                                const SweepOptions& options) {
    if (windows.empty()) throw std::invalid_argument("thermodynamic_sweep: no windows");
    for (std::size_t i = 0; i + 1 < windows.size(); ++i) require_nested(windows[i], windows[i + 1], config.potential.grid);
    for (const auto& w : windows)
        if (!options.observation.empty() && !options.observation.is_subset_of(w))
            throw std::invalid_argument("thermodynamic_sweep: observation window must lie in every window");

    SweepReport rep;
    rep.lines = {{"mean_mass_obs", {}, {}}, {"mean_exp_neg_mass_obs", {}, {}}, {"exp_moment_cube", {}, {}}};
    const auto& grid = config.potential.grid;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const Window& w = windows[i];
        ChainConfig c = config;
        c.window = w;
        c.boundary = xi;
        c.seed = derive_seed(config.seed, 10 + i);
        const auto run = run_specification(c);
        std::vector<double> m, e, q;
        for (const auto& s : run.samples) {
            const double mo = s.mass_in(options.observation);
            const double mk = s.mass_in_cube(options.cube, grid);
            m.push_back(mo);
            e.push_back(std::exp(-mo));
            q.push_back(std::exp(options.lambda * mk * mk));
        }
        rep.windows.push_back(w.describe());
        rep.window_volumes.push_back(w.volume());
        rep.lines[0].per_window.push_back(chain_estimate(m));
        rep.lines[1].per_window.push_back(chain_estimate(e));
        rep.lines[2].per_window.push_back(chain_estimate(q));
    }
    rep.stabilized = true;
    rep.all_within = true;
    for (auto& line : rep.lines) {
        for (std::size_t i = 1; i < line.per_window.size(); ++i) {
            const double z = z_independent(line.per_window[i], line.per_window[i - 1]);
            line.successive_z.push_back(z);
            rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
            if (std::abs(z) > 4.0) {
                rep.all_within = false;
                if (i + 1 == line.per_window.size()) rep.stabilized = false;
            }
        }
    }
    return rep;
}

}  // namespace gammagibbs
