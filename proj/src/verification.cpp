#include "gammagibbs/verification.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/factorials.hpp>

#include "gammagibbs/special.hpp"

namespace gammagibbs {

void finalize(CheckReport& r) {
    r.z = safe_z(r.diff, r.diff_se);
    if (!std::isfinite(r.z)) r.z = std::copysign(1e300, r.diff);
    if (r.negative_control)
        r.pass = std::abs(r.diff) - r.bias_budget > r.threshold * r.diff_se;
    else
        r.pass = std::abs(r.diff) <= r.threshold * r.diff_se + r.bias_budget;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double sum_over_atoms(const DiscreteMeasure& eta, const PointFunctional& F) {
    double s = 0.0;
    std::vector<double> x(static_cast<std::size_t>(eta.dimension()));
    for (std::size_t i = 0; i < eta.size(); ++i) {
        eta.position(i, x);
        s += eta.mark(i) * F.f(x, eta);
    }
    return s;
}

void require_bounded(const PointFunctional& F) {
    if (!F.f || !std::isfinite(F.sup) || F.sup < 0.0)
        throw FunctionalError("functional '" + F.name + "' lacks a finite boundedness certificate");
}

// Integral of g(s) * density(s) over (a, inf), split at 1 for the singular part.
double mark_integral(const LevySpec& levy, const std::function<double(double)>& g, double a) {
    auto f = [&](double s) { return g(s) * levy.density(s); };
    double total = 0.0;
    if (a < 1.0) total += special::integrate(f, a, 1.0);
    total += special::integrate(f, std::max(a, 1.0), INFINITY);
    return total;
}

// Cumulants of eta(Delta) for a measure whose marks are restricted to [a, inf).
double cumulant(const LevySpec& levy, double volume, int j, double a) {
    if (levy.is_gamma()) {
        const double fact = boost::math::factorial<double>(static_cast<unsigned>(j - 1));
        const double tail = a > 0.0 ? special::gamma_q(j, a) : 1.0;
        return levy.theta() * volume * fact * tail;
    }
    return volume * mark_integral(levy, [j](double s) { return std::pow(s, j); }, a);
}

double raw_moment(const LevySpec& levy, double volume, int n, double a) {
    std::vector<double> mu(static_cast<std::size_t>(n + 1), 0.0);
    mu[0] = 1.0;
    for (int m = 1; m <= n; ++m) {
        double s = 0.0;
        for (int k = 1; k <= m; ++k)
            s += boost::math::binomial_coefficient<double>(static_cast<unsigned>(m - 1), static_cast<unsigned>(k - 1)) *
                 cumulant(levy, volume, k, a) * mu[static_cast<std::size_t>(m - k)];
        mu[static_cast<std::size_t>(m)] = s;
    }
    return mu[static_cast<std::size_t>(n)];
}

// E exp(-t eta(Delta)) with marks restricted to [a, inf).
double laplace(const LevySpec& levy, double volume, double t, double a) {
    if (levy.is_gamma()) {
        const double th = levy.theta();
        if (a == 0.0) return std::exp(-th * volume * std::log1p(t));
        return std::exp(-th * volume * (special::expint_e1(a) - special::expint_e1((1.0 + t) * a)));
    }
    return std::exp(-volume * mark_integral(levy, [t](double s) { return -std::expm1(-t * s); }, a));
}

std::vector<double> masses(const LevySpec& levy, const Window& window, std::size_t n, Rng& rng) {
    std::vector<double> out(n);
    for (auto& m : out) m = sample_gamma_measure(levy, window, rng).total_mass();
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

PointFunctional indicator_functional(const Window& window) {
    return {"indicator", [window](std::span<const double> x, const DiscreteMeasure&) { return window.contains(x) ? 1.0 : 0.0; }, 1.0};
}

PointFunctional indicator_exp_mass_functional(const Window& window) {
    return {"indicator_exp_neg_mass",
            [window](std::span<const double> x, const DiscreteMeasure& eta) {
                return window.contains(x) ? std::exp(-eta.mass_in(window)) : 0.0;
            },
            1.0};
}

PointFunctional zero_functional() {
    return {"zero", [](std::span<const double>, const DiscreteMeasure&) { return 0.0; }, 0.0};
}

std::vector<CheckReport> mecke_check(const LevySpec& levy, const Window& window, const PointFunctional& F,
                                     std::size_t n_samples, Rng& rng, const MeckeOptions& options) {
    require_bounded(F);
    if (n_samples < 2) throw std::invalid_argument("mecke_check: need at least two samples");
    const double vol = window.volume();
    const double nu = truncated_mass(levy) * vol;
    const double m1 = truncated_first_moment(levy);
    std::vector<double> lhs(n_samples), rhs(n_samples), d(n_samples);
    std::vector<double> x(static_cast<std::size_t>(window.dimension()));
    for (std::size_t i = 0; i < n_samples; ++i) {
        DiscreteMeasure eta = sample_gamma_measure(levy, window, rng);
        lhs[i] = sum_over_atoms(eta, F);
        window.sample_point(rng, x);
        double s, w;
        if (levy.is_gamma()) {
            s = sample_size_biased_mark(levy, rng);
            w = vol * m1;
        } else {
            s = sample_mark(levy, rng);
            w = nu * s;
        }
        eta.add(x, s);
        rhs[i] = options.rhs_intensity_scale * w * F.f(x, eta);
        d[i] = lhs[i] - rhs[i];
    }
    const auto loss = truncation_bias(levy, vol);
    const bool control = options.rhs_intensity_scale != 1.0;

    std::vector<CheckReport> out;
    CheckReport r;
    r.name = std::string(control ? "mecke_wrong_intensity_" : "mecke_") + F.name;
    r.lhs = iid_estimate(lhs);
    r.rhs = iid_estimate(rhs);
    const Estimate de = iid_estimate(d);
    r.diff = de.mean;
    r.diff_se = de.se();
    r.threshold = control ? 4.0 : options.threshold;
    r.bias_budget = 2.0 * loss.mean_loss * F.sup;
    r.negative_control = control;
    if (control) r.note = "rhs intensity scaled by " + fmt(options.rhs_intensity_scale);
    finalize(r);
    out.push_back(r);

    if (options.closed_form) {
        if (!levy.is_gamma()) throw std::invalid_argument("mecke closed form is available for the gamma kind only");
        const double a = levy.theta() * vol;
        const double full = a * std::pow(2.0, -a - 1.0);
        const double eps = levy.trunc();
        const double trunc = eps > 0.0 ? 0.5 * a * std::exp(-2.0 * eps) * laplace(levy, vol, 1.0, eps) : full;
        CheckReport c;
        c.name = "mecke_closed_form_" + F.name;
        c.lhs = r.lhs;
        c.rhs = Estimate::exact(full);
        c.diff = r.lhs.mean - full;
        c.diff_se = r.lhs.se();
        c.threshold = options.threshold;
        c.bias_budget = std::abs(full - trunc);
        c.note = "target theta m 2^{-theta m - 1}";
        finalize(c);
        out.push_back(c);
    }
    return out;
}

CheckReport gnz_check(const std::vector<DiscreteMeasure>& samples, const ChainConfig& config, const PointFunctional& F,
                      Rng& rng, const GnzOptions& options) {
    require_bounded(F);
    if (samples.size() < 2) throw std::invalid_argument("gnz_check: need at least two samples");
    if (options.weight == GnzWeight::Phi && config.potential.include_diagonal)
        throw ConfigMismatchError(
            "gnz_check: the Phi weight omits the self-pair term but the sampled Hamiltonian includes it");
    const auto& levy = config.levy;
    const Window& window = config.window;
    const double vol = window.volume();
    const double nu = truncated_mass(levy) * vol;
    const double m1 = truncated_first_moment(levy);
    LocalEnergy energy(config.potential, window, config.boundary);

    std::vector<double> lhs, rhs, d;
    Birth b{std::vector<double>(static_cast<std::size_t>(window.dimension())), 0.0};
    for (const auto& eta : samples) {
        energy.reset(eta);
        const double l = sum_over_atoms(eta, F);
        window.sample_point(rng, b.x);
        double w;
        if (levy.is_gamma()) {
            b.s = sample_size_biased_mark(levy, rng);
            w = vol * m1;
        } else {
            b.s = sample_mark(levy, rng);
            w = nu * b.s;
        }
        // With the self-pair term excluded the literal increment is exactly Phi
        // plus the boundary coupling, so both weights reduce to the same call.
        const double W = options.mode == GnzMode::Weighted ? energy.increment(eta, Move{b}) : 0.0;
        DiscreteMeasure aug = eta;
        aug.add(b.x, b.s);
        const double r = w * F.f(b.x, aug) * std::exp(-W);
        lhs.push_back(l);
        rhs.push_back(r);
        d.push_back(l - r);
    }
    CheckReport rep;
    const bool control = options.mode == GnzMode::Unweighted;
    rep.name = std::string(control ? "gnz_unweighted_" : "gnz_") + F.name;
    rep.lhs = chain_estimate(lhs);
    rep.rhs = chain_estimate(rhs);
    const Estimate de = chain_estimate(d);
    rep.diff = de.mean;
    rep.diff_se = de.se();
    rep.threshold = options.threshold;
    rep.negative_control = control;
    if (control)
        rep.note = "weight e^{-W} omitted";
    else
        rep.note = options.weight == GnzWeight::Literal ? "weight: literal energy increment" : "weight: Phi";
    finalize(rep);
    return rep;
}

MonotoneFunctional MonotoneFunctional::capped_mass(const Window& window, double cap) {
    return {"min(mass(" + window.describe() + ")," + fmt(cap) + ")",
            [window, cap](const DiscreteMeasure& e) { return std::min(e.mass_in(window), cap); }, true};
}

FkgResult fkg_check(const LevySpec& levy, const Window& sampling_window, const MonotoneFunctional& F,
                    const MonotoneFunctional& G, std::size_t n_samples, Rng& rng) {
    if (!F.certified_increasing || !G.certified_increasing)
        throw FunctionalError("fkg_check: functionals must be certified increasing");
    std::vector<double> f(n_samples), g(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const DiscreteMeasure eta = sample_gamma_measure(levy, sampling_window, rng);
        f[i] = F.f(eta);
        g[i] = G.f(eta);
    }
    const auto c = covariance(f, g);
    FkgResult out;
    auto& r = out.report;
    r.name = "fkg_cov(" + F.name + "," + G.name + ")";
    r.lhs = {c.cov, c.se, static_cast<double>(n_samples), n_samples};
    r.rhs = Estimate::exact(0.0);
    r.diff = c.cov;
    r.diff_se = c.se;
    r.threshold = 3.0;
    r.z = safe_z(c.cov, c.se);
    r.pass = c.cov >= -3.0 * c.se;
    r.note = "one-sided: cov >= -3 SE";
    out.strictly_positive = c.cov > 3.0 * c.se;
    return out;
}

CheckReport laplace_check(const LevySpec& levy, const Window& window, double t, std::size_t n_samples, Rng& rng) {
    const double vol = window.volume();
    std::vector<double> v(n_samples);
    for (auto& x : v) x = std::exp(-t * sample_gamma_measure(levy, window, rng).total_mass());
    CheckReport r;
    r.name = "laplace_t=" + fmt(t) + "_m=" + fmt(vol);
    r.lhs = iid_estimate(v);
    const double target = laplace(levy, vol, t, 0.0);
    r.rhs = Estimate::exact(target);
    r.diff = r.lhs.mean - target;
    r.diff_se = r.lhs.se();
    r.bias_budget = std::abs(laplace(levy, vol, t, levy.trunc()) - target);
    finalize(r);
    return r;
}

CheckReport moment_check(const LevySpec& levy, const Window& window, int order, std::size_t n_samples, Rng& rng) {
    if (order < 1) throw std::invalid_argument("moment_check: order must be >= 1");
    const double vol = window.volume();
    auto m = masses(levy, window, n_samples, rng);
    for (auto& x : m) x = std::pow(x, order);
    CheckReport r;
    r.name = "moment_n=" + std::to_string(order);
    r.lhs = iid_estimate(m);
    const double target = raw_moment(levy, vol, order, 0.0);
    r.rhs = Estimate::exact(target);
    r.diff = r.lhs.mean - target;
    r.diff_se = r.lhs.se();
    r.threshold = 4.0;
    r.bias_budget = std::abs(raw_moment(levy, vol, order, levy.trunc()) - target);
    finalize(r);
    return r;
}

CheckReport moment_bound_check(const LevySpec& levy, const Window& window, int order, std::size_t n_samples, Rng& rng) {
    if (!levy.is_gamma()) throw std::invalid_argument("moment_bound_check: gamma kind only");
    const double a = levy.theta() * window.volume();
    auto m = masses(levy, window, n_samples, rng);
    for (auto& x : m) x = std::pow(x, order);
    CheckReport r;
    r.name = "moment_bound_n=" + std::to_string(order) + "_theta_m=" + fmt(a);
    r.lhs = iid_estimate(m);
    const double bound = boost::math::factorial<double>(static_cast<unsigned>(order)) * std::pow(a, order);
    r.rhs = Estimate::exact(bound);
    r.diff = r.lhs.mean - bound;
    r.diff_se = r.lhs.se();
    r.threshold = 4.0;
    r.z = safe_z(r.diff, r.diff_se);
    r.pass = r.diff <= 4.0 * r.diff_se;
    r.note = "one-sided: E eta^n <= n! (theta m)^n + 4 SE";
    return r;
}

CheckReport variance_check(const LevySpec& levy, const Window& window, std::size_t n_samples, Rng& rng) {
    const double vol = window.volume();
    const auto m = masses(levy, window, n_samples, rng);
    double mean = 0.0;
    for (double x : m) mean += x;
    mean /= static_cast<double>(m.size());
    std::vector<double> u(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) u[i] = (m[i] - mean) * (m[i] - mean);
    Estimate var = iid_estimate(u);
    var.mean *= static_cast<double>(m.size()) / static_cast<double>(m.size() - 1);
    CheckReport r;
    r.name = "variance_m=" + fmt(vol);
    r.lhs = var;
    const double target = cumulant(levy, vol, 2, 0.0);
    r.rhs = Estimate::exact(target);
    r.diff = var.mean - target;
    r.diff_se = var.se();
    r.threshold = 4.0;
    r.bias_budget = truncation_bias(levy, vol).variance_loss;
    finalize(r);
    return r;
}

CheckReport independence_check(const LevySpec& levy, const Window& a, const Window& b, const Window& sampling_window,
                               std::size_t n_samples, Rng& rng) {
    std::vector<double> f(n_samples), g(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const DiscreteMeasure eta = sample_gamma_measure(levy, sampling_window, rng);
        f[i] = std::exp(-eta.mass_in(a));
        g[i] = std::exp(-eta.mass_in(b));
    }
    const auto c = covariance(f, g);
    CheckReport r;
    r.name = "independence_cov";
    r.lhs = {c.cov, c.se, static_cast<double>(n_samples), n_samples};
    r.rhs = Estimate::exact(0.0);
    r.diff = c.cov;
    r.diff_se = c.se;
    finalize(r);
    return r;
}

CheckReport marginal_ks_check(const LevySpec& levy, const Window& window, std::size_t n_samples, Rng& rng,
                              double level) {
    if (!levy.is_gamma()) throw std::invalid_argument("marginal_ks_check: gamma kind only");
    const double a = levy.theta() * window.volume();
    const auto m = masses(levy, window, n_samples, rng);
    const double d = special::ks_statistic(m, [a](double x) { return x <= 0.0 ? 0.0 : special::gamma_p(a, x); });
    const double p = special::ks_pvalue(d, m.size());
    CheckReport r;
    r.name = "marginal_ks_theta_m=" + fmt(a);
    r.lhs = {d, 0.0, static_cast<double>(n_samples), n_samples};
    r.rhs = Estimate::exact(0.0);
    r.diff = d;
    r.z = std::sqrt(static_cast<double>(n_samples)) * d;
    r.threshold = level;
    r.pass = p > level;
    r.note = "KS p-value " + fmt(p);
    return r;
}

// ---------------------------------------------------------------------------

bool SuiteReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.pass; });
}

std::vector<std::string> suite_names() { return {"free-measure", "gibbs", "bounds", "negative-control", "all"}; }

namespace {

Window unit_box(int d, double side) {
    return Window::box(std::vector<double>(static_cast<std::size_t>(d), 0.0),
                       std::vector<double>(static_cast<std::size_t>(d), side));
}

void free_measure_suite(const SuiteConfig& c, SuiteReport& rep) {
    Rng root(c.seed, 100);
    const auto levy = LevySpec::gamma(c.theta, c.trunc);
    const auto n = c.n_samples;
    std::uint64_t stream = 0;
    for (double vol : {0.5, 1.0, 4.0}) {
        const Window w = unit_box(c.dimension, std::pow(vol, 1.0 / c.dimension));
        for (double t : {0.25, 0.5, 1.0, 2.0}) {
            Rng r = root.split(stream++);
            rep.checks.push_back(laplace_check(levy, w, t, n, r));
        }
    }
    const Window w1 = unit_box(c.dimension, 1.0);
    {
        Rng r = root.split(stream++);
        rep.checks.push_back(moment_check(levy, w1, 1, n, r));
    }
    {
        Rng r = root.split(stream++);
        rep.checks.push_back(moment_check(levy, w1, 2, n, r));
    }
    {
        Rng r = root.split(stream++);
        rep.checks.push_back(variance_check(levy, w1, n, r));
    }
    {
        std::vector<double> lo(static_cast<std::size_t>(c.dimension), 0.0), mid = lo, hi(lo.size(), 1.0);
        mid[0] = 0.5;
        std::vector<double> hi_a = hi;
        hi_a[0] = 0.5;
        Rng r = root.split(stream++);
        rep.checks.push_back(independence_check(levy, Window::box(lo, hi_a), Window::box(mid, hi), w1, n, r));
    }
    {
        Rng r = root.split(stream++);
        rep.checks.push_back(marginal_ks_check(levy, w1, std::min<std::size_t>(n, 10000), r));
    }
    {
        Rng r = root.split(stream++);
        for (auto& x : mecke_check(levy, w1, indicator_functional(w1), n, r)) rep.checks.push_back(x);
        Rng r2 = root.split(stream++);
        MeckeOptions o;
        o.closed_form = true;
        for (auto& x : mecke_check(levy, w1, indicator_exp_mass_functional(w1), n, r2, o)) rep.checks.push_back(x);
    }
    {
        std::vector<double> lo(static_cast<std::size_t>(c.dimension), 0.0), hi(lo.size(), 1.0);
        auto a_hi = hi;
        a_hi[0] = 0.5;
        auto b_lo = lo;
        b_lo[0] = 0.5;
        const Window a = Window::box(lo, a_hi), b = Window::box(b_lo, hi);
        const auto Fa = MonotoneFunctional::capped_mass(a, 5.0);
        const auto Fb = MonotoneFunctional::capped_mass(b, 5.0);
        const auto Fw = MonotoneFunctional::capped_mass(w1, 5.0);
        Rng r1 = root.split(stream++), r2 = root.split(stream++), r3 = root.split(stream++);
        rep.checks.push_back(fkg_check(levy, w1, Fw, Fw, n, r1).report);
        rep.checks.push_back(fkg_check(levy, w1, Fa, Fb, n, r2).report);
        auto overlap = fkg_check(levy, w1, Fa, Fw, n, r3);
        overlap.report.pass = overlap.report.pass && overlap.strictly_positive;
        overlap.report.note += "; overlapping pair must exceed +3 SE";
        rep.checks.push_back(overlap.report);
    }
}

struct GibbsSetup {
    CubeGrid grid;
    PotentialSpec spec;
    LevySpec levy;
};

GibbsSetup gibbs_setup(const SuiteConfig& c) {
    CubeGrid grid(c.dimension, c.delta, c.range);
    return {grid, certify_or_throw(c.potential, grid), LevySpec::gamma(c.theta, c.trunc)};
}

ChainConfig chain_for(const GibbsSetup& s, const SuiteConfig& c, const Window& w, std::uint64_t stream) {
    ChainConfig cfg(s.levy, s.spec, w);
    cfg.n_steps = c.chain_steps;
    cfg.default_burn_in();
    cfg.thinning = c.thinning;
    cfg.seed = Rng(c.seed, stream).engine()();
    return cfg;
}

void gibbs_suite(const SuiteConfig& c, SuiteReport& rep) {
    const auto s = gibbs_setup(c);
    const Window q0 = Window::centered_block(s.grid, 0);

    // GNZ on a single cube
    {
        auto cfg = chain_for(s, c, q0, 200);
        const auto run = run_specification(cfg);
        Rng r(c.seed, 201);
        rep.checks.push_back(gnz_check(run.samples, cfg, indicator_functional(q0), r));
    }
    // consistency: single cube inside a block of 2r+1 cubes
    {
        const Window big = Window::centered_block(s.grid, 1);
        auto cfg = chain_for(s, c, big, 210);
        const auto cr = consistency_check(q0, big, DiscreteMeasure(c.dimension), cfg);
        for (const auto& line : cr.lines) {
            CheckReport r;
            r.name = "consistency_" + line.name;
            r.lhs = line.direct;
            r.rhs = line.resampled;
            r.diff = line.direct.mean - line.resampled.mean;
            r.diff_se = std::hypot(line.direct.se(), line.resampled.se());
            r.threshold = 4.0;
            finalize(r);
            rep.checks.push_back(r);
        }
    }
    // partition function for the repulsive part alone
    {
        const auto step = uncertified(PairPotential::step(c.potential.strength(), c.delta), s.grid);
        Rng r(c.seed, 220);
        const Estimate z = estimate_partition_function(q0, DiscreteMeasure(c.dimension), step, s.levy,
                                                       std::min<std::size_t>(c.n_samples, 20000), r);
        CheckReport cr;
        cr.name = "partition_function_le_1";
        cr.lhs = z;
        cr.rhs = Estimate::exact(1.0);
        cr.diff = z.mean - 1.0;
        cr.diff_se = z.se();
        cr.z = safe_z(cr.diff, cr.diff_se);
        cr.pass = z.mean <= 1.0 + 3.0 * z.se() && z.mean > 0.0;
        cr.note = "one-sided: Z <= 1 + 3 SE";
        rep.checks.push_back(cr);
    }
}

void bounds_suite(const SuiteConfig& c, SuiteReport& rep) {
    const auto s = gibbs_setup(c);
    const Window q0 = Window::centered_block(s.grid, 0);
    const Window block = Window::centered_block(s.grid, 1);
    const IndexHull hull = index_hull(block, s.grid);

    // deterministic stability on free-field states with a random boundary
    {
        Rng r(c.seed, 300);
        Window outer = Window::from_cubes(s.grid, [&] {
            std::vector<CubeIndex> all = hull.interior;
            all.insert(all.end(), hull.shell.begin(), hull.shell.end());
            std::sort(all.begin(), all.end());
            all.erase(std::unique(all.begin(), all.end()), all.end());
            return all;
        }());
        std::uint64_t violations = 0;
        const std::size_t n = 10000;
        for (std::size_t i = 0; i < n; ++i) {
            const DiscreteMeasure eta = sample_gamma_measure(s.levy, block, r);
            const DiscreteMeasure xi_all = sample_gamma_measure(s.levy, outer, r);
            DiscreteMeasure xi = xi_all.restrict_where([&](std::span<const double> x) { return !block.contains(x); });
            const double h = hamiltonian(eta, xi, block, s.spec);
            const double bound = stability_lower_bound(eta, xi, block, s.spec);
            if (h < bound - 1e-12 * std::max({1.0, std::abs(h), std::abs(bound)})) ++violations;
        }
        CheckReport cr;
        cr.name = "stability_bound_violations";
        cr.lhs = Estimate::exact(static_cast<double>(violations));
        cr.rhs = Estimate::exact(0.0);
        cr.diff = static_cast<double>(violations);
        cr.pass = violations == 0;
        cr.note = "10000 free-field states";
        rep.checks.push_back(cr);
    }
    // exp-moment and one-point bounds on a single cube
    {
        const double eps_h = default_eps_h(s.spec, c.theta);
        const auto bc = bound_constants(s.spec, c.theta, eps_h, q0);
        auto cfg = chain_for(s, c, q0, 310);
        const auto run = run_specification(cfg);
        const CubeIndex k0 = s.grid.origin();
        std::vector<double> sq;
        for (const auto& e : run.samples) {
            const double m = e.mass_in_cube(k0, s.grid);
            sq.push_back(m * m);
        }
        const Estimate second = chain_estimate(sq);
        for (double frac : {0.25, 0.5, 1.0}) {
            const double lam = frac * bc.lambda0;
            const Estimate em = exp_moment(run.samples, lam, k0, s.grid);
            CheckReport cr;
            cr.name = "exp_moment_lambda=" + fmt(frac) + "lambda0";
            cr.lhs = em;
            const double logc = bc.log_C_lambda(lam);
            cr.rhs = Estimate::exact(logc);
            cr.diff = std::log(std::max(em.mean - 3.0 * em.se(), 1e-300)) - logc;
            cr.pass = cr.diff <= 0.0;
            cr.note = "log scale: log(mean - 3 SE) <= log C_lambda";
            rep.checks.push_back(cr);

            CheckReport dr;
            dr.name = "dobrushin_lambda=" + fmt(frac) + "lambda0";
            dr.lhs = second;
            const double bound = bc.dobrushin_bound(lam, 0.0);
            dr.rhs = Estimate::exact(bound);
            dr.diff = second.mean - bound;
            dr.diff_se = second.se();
            dr.z = safe_z(dr.diff, dr.diff_se);
            dr.pass = second.mean - 3.0 * second.se() <= bound;
            dr.note = "one-sided";
            rep.checks.push_back(dr);
        }
    }
}

void negative_control_suite(const SuiteConfig& c, SuiteReport& rep) {
    const auto levy = LevySpec::gamma(c.theta, c.trunc);
    const Window w1 = unit_box(c.dimension, 1.0);
    {
        Rng r(c.seed, 400);
        MeckeOptions o;
        o.rhs_intensity_scale = 0.5;
        for (auto& x : mecke_check(levy, w1, indicator_functional(w1), c.n_samples, r, o)) rep.checks.push_back(x);
    }
    const auto s = gibbs_setup(c);
    const Window q0 = Window::centered_block(s.grid, 0);
    {
        auto cfg = chain_for(s, c, q0, 410);
        const auto run = run_specification(cfg);
        Rng r(c.seed, 411);
        GnzOptions o;
        o.mode = GnzMode::Unweighted;
        rep.checks.push_back(gnz_check(run.samples, cfg, indicator_functional(q0), r, o));
    }
    {
        const Window big = Window::centered_block(s.grid, 1);
        auto cfg = chain_for(s, c, big, 420);
        ConsistencyOptions o;
        o.inner_energy_scale = 2.0;
        const auto cr = consistency_check(q0, big, DiscreteMeasure(c.dimension), cfg, o);
        CheckReport r;
        r.name = "consistency_scaled_inner_kernel";
        r.negative_control = true;
        r.threshold = 4.0;
        // the control is detected when any functional of the panel separates
        for (const auto& line : cr.lines) {
            const double se = std::hypot(line.direct.se(), line.resampled.se());
            const double diff = line.direct.mean - line.resampled.mean;
            if (std::abs(safe_z(diff, se)) >= std::abs(safe_z(r.diff, r.diff_se)) || r.diff_se == 0.0) {
                r.lhs = line.direct;
                r.rhs = line.resampled;
                r.diff = diff;
                r.diff_se = se;
                r.note = "strongest panel line: " + line.name;
            }
        }
        finalize(r);
        rep.checks.push_back(r);
    }
}

}  // namespace

SuiteReport run_suite(const std::string& name, const SuiteConfig& config) {
    SuiteReport rep;
    rep.suite = name;
    if (name == "free-measure")
        free_measure_suite(config, rep);
    else if (name == "gibbs")
        gibbs_suite(config, rep);
    else if (name == "bounds")
        bounds_suite(config, rep);
    else if (name == "negative-control")
        negative_control_suite(config, rep);
    else if (name == "all") {
        free_measure_suite(config, rep);
        gibbs_suite(config, rep);
        bounds_suite(config, rep);
        negative_control_suite(config, rep);
    } else
        throw UnknownSuiteError("unknown suite '" + name + "'");
    return rep;
}

}  // namespace gammagibbs
