#include "gammagibbs/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace gammagibbs {

namespace {

constexpr int kProbePairs = 100000;

double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

constexpr std::uint64_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

struct Constants {
    double sup = 0.0, b = 0.0, A_delta = 0.0;
};

// inf of a radial step profile over r in [0, delta]
Constants radial_constants(const PairPotential& p, double delta) {
    Constants c;
    switch (p.family()) {
        case PotentialFamily::Zero:
            break;
        case PotentialFamily::Step:
            c.sup = std::abs(p.strength());
            c.b = std::max(0.0, -p.strength());
            c.A_delta = delta <= p.support() ? p.strength() : std::min(p.strength(), 0.0);
            break;
        case PotentialFamily::CoreShell: {
            const double A = p.strength(), shell = -p.depth();
            c.sup = std::max(std::abs(A), std::abs(shell));
            c.b = std::max(0.0, -std::min(A, shell));
            if (delta <= p.core())
                c.A_delta = A;
            else if (delta <= p.support())
                c.A_delta = std::min(A, shell);
            else
                c.A_delta = std::min({A, shell, 0.0});
            break;
        }
        case PotentialFamily::Custom:
            break;
    }
    return c;
}

PotentialSpec base_spec(const PairPotential& potential, const CubeGrid& grid) {
    return PotentialSpec{potential,
                         grid,
                         grid.range(),
                         0.0,
                         0.0,
                         grid.delta(),
                         0.0,
                         interaction_parameter(grid.dimension(), grid.range(), grid.delta()),
                         false,
                         false,
                         true};
}

// Constants of a custom potential from a deterministic Halton probe. Returns a
// rejection for clauses that the probe can witness directly.
std::optional<Rejection> probe_custom(const PairPotential& p, const CubeGrid& grid, Constants& c) {
    const int d = grid.dimension();
    const double R = grid.range(), delta = grid.delta();
    const auto ud = static_cast<std::size_t>(d);
    if (3 * ud > std::size(kPrimes)) throw std::invalid_argument("custom certification supports dimension <= 8");
    std::vector<double> x(ud), y(ud);
    double inf_all = INFINITY, inf_core = INFINITY, sup = 0.0;
    for (std::uint64_t i = 1; i <= static_cast<std::uint64_t>(kProbePairs); ++i) {
        // base point in [-R, R]^d; offset in [-2R, 2R]^d for range/sign checks,
        // plus a second offset scaled into the delta-ball for the repulsion clause
        for (std::size_t a = 0; a < ud; ++a) {
            x[a] = R * (2.0 * radical_inverse(i, kPrimes[a]) - 1.0);
            y[a] = x[a] + 2.0 * R * (2.0 * radical_inverse(i, kPrimes[ud + a]) - 1.0);
        }
        double r2 = 0.0;
        for (std::size_t a = 0; a < ud; ++a) r2 += (x[a] - y[a]) * (x[a] - y[a]);
        const double v = p(x, y);
        if (!std::isfinite(v))
            return Rejection{"lower_bound", x, y, v, 0.0, "potential is not finite at the witness pair"};
        const double w = p(y, x);
        if (w != v)
            return Rejection{"symmetry", x, y, v, w, "phi(x,y) = " + fmt(v) + " but phi(y,x) = " + fmt(w)};
        const double r = std::sqrt(r2);
        if (r > R && v != 0.0)
            return Rejection{"finite_range", x, y, v, 0.0,
                             "phi(x,y) = " + fmt(v) + " at distance " + fmt(r) + " > R = " + fmt(R)};
        sup = std::max(sup, std::abs(v));
        inf_all = std::min(inf_all, v);
        if (r <= delta) inf_core = std::min(inf_core, v);

        double q2 = 0.0;
        for (std::size_t a = 0; a < ud; ++a) {
            y[a] = x[a] + delta / std::sqrt(static_cast<double>(d)) *
                              (2.0 * radical_inverse(i, kPrimes[2 * ud + a]) - 1.0);
            q2 += (x[a] - y[a]) * (x[a] - y[a]);
        }
        if (q2 <= delta * delta) {
            const double u = p(x, y);
            if (!std::isfinite(u))
                return Rejection{"lower_bound", x, y, u, 0.0, "potential is not finite at the witness pair"};
            sup = std::max(sup, std::abs(u));
            inf_all = std::min(inf_all, u);
            inf_core = std::min(inf_core, u);
        }
        const double s = p(x, x);
        sup = std::max(sup, std::abs(s));
        inf_all = std::min(inf_all, s);
        inf_core = std::min(inf_core, s);
    }
    c.sup = sup;
    c.b = std::max(0.0, -inf_all);
    c.A_delta = inf_core;
    return std::nullopt;
}

std::variant<PotentialSpec, Rejection> evaluate(const PairPotential& potential, const CubeGrid& grid,
                                                bool enforce_repulsion) {
    PotentialSpec spec = base_spec(potential, grid);
    Constants c;
    if (potential.family() == PotentialFamily::Custom) {
        if (auto r = probe_custom(potential, grid, c)) return *r;
        spec.numeric = true;
    } else {
        if (potential.support() > grid.range() * (1.0 + 1e-12)) {
            std::vector<double> x(static_cast<std::size_t>(grid.dimension()), 0.0), y = x;
            y[0] = potential.support();
            return Rejection{"finite_range", x, y, potential(x, y), grid.range(),
                             "potential support " + fmt(potential.support()) + " exceeds R = " + fmt(grid.range())};
        }
        c = radial_constants(potential, grid.delta());
    }
    spec.sup_norm = c.sup;
    spec.b = c.b;
    spec.A_delta = c.A_delta;

    const double threshold = 2.0 * spec.m_phi * spec.b;
    if (enforce_repulsion && !(spec.A_delta > threshold)) {
        std::vector<double> x(static_cast<std::size_t>(grid.dimension()), 0.0);
        return Rejection{"repulsion_condition", x, x, spec.A_delta, threshold,
                         "A_delta = " + fmt(spec.A_delta) + " must exceed 2 m b = " + fmt(threshold)};
    }
    spec.certified = enforce_repulsion;
    return spec;
}

}  // namespace

// ---------------------------------------------------------------------------

PairPotential PairPotential::zero() { return PairPotential{}; }

PairPotential PairPotential::step(double A, double radius) {
    if (!std::isfinite(A)) throw std::invalid_argument("step potential: A must be finite");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("step potential: radius must be positive");
    PairPotential p;
    p.family_ = PotentialFamily::Step;
    p.A_ = A;
    p.core_ = radius;
    p.support_ = radius;
    return p;
}

PairPotential PairPotential::core_shell(double A, double depth, double core, double range) {
    if (!std::isfinite(A) || !std::isfinite(depth)) throw std::invalid_argument("core-shell potential: non-finite value");
    if (!(core > 0.0) || !(range >= core) || !std::isfinite(range))
        throw std::invalid_argument("core-shell potential: need 0 < core <= range");
    PairPotential p;
    p.family_ = PotentialFamily::CoreShell;
    p.A_ = A;
    p.depth_ = depth;
    p.core_ = core;
    p.support_ = range;
    return p;
}

PairPotential PairPotential::custom(PairFunction phi, std::string name) {
    if (!phi) throw std::invalid_argument("custom potential needs a callable");
    PairPotential p;
    p.family_ = PotentialFamily::Custom;
    p.name_ = std::move(name);
    p.fn_ = std::make_shared<const PairFunction>(std::move(phi));
    return p;
}

std::string PairPotential::name() const {
    switch (family_) {
        case PotentialFamily::Zero: return "zero";
        case PotentialFamily::Step: return "step";
        case PotentialFamily::CoreShell: return "core-shell";
        case PotentialFamily::Custom: return name_;
    }
    return "unknown";
}

double PairPotential::operator()(std::span<const double> x, std::span<const double> y) const {
    if (family_ == PotentialFamily::Custom) return (*fn_)(x, y);
    if (family_ == PotentialFamily::Zero) return 0.0;
    double r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double d = y[a] - x[a];
        r2 = r2 + d * d;
    }
    if (r2 <= core_ * core_) return A_;
    if (family_ == PotentialFamily::CoreShell && r2 <= support_ * support_) return -depth_;
    return 0.0;
}

std::optional<kernels::RadialProfile> PairPotential::profile() const {
    switch (family_) {
        case PotentialFamily::Zero:
            return kernels::RadialProfile{-1.0, 0.0, -1.0, 0.0};
        case PotentialFamily::Step:
            return kernels::RadialProfile{core_ * core_, A_, core_ * core_, A_};
        case PotentialFamily::CoreShell:
            return kernels::RadialProfile{core_ * core_, A_, support_ * support_, -depth_};
        case PotentialFamily::Custom:
            return std::nullopt;
    }
    return std::nullopt;
}

PairPotential PairPotential::scaled(double factor) const {
    PairPotential p = *this;
    p.A_ *= factor;
    p.depth_ *= factor;
    if (family_ == PotentialFamily::Custom) {
        auto inner = fn_;
        p.fn_ = std::make_shared<const PairFunction>(
            [inner, factor](std::span<const double> x, std::span<const double> y) { return factor * (*inner)(x, y); });
    }
    return p;
}

CertificationError::CertificationError(Rejection r)
    : std::invalid_argument(r.clause + ": " + r.message), rejection_(std::move(r)) {}

std::variant<PotentialSpec, Rejection> certify(const PairPotential& potential, const CubeGrid& grid) {
    return evaluate(potential, grid, true);
}

PotentialSpec certify_or_throw(const PairPotential& potential, const CubeGrid& grid) {
    auto r = certify(potential, grid);
    if (auto* rej = std::get_if<Rejection>(&r)) throw CertificationError(*rej);
    return std::get<PotentialSpec>(std::move(r));
}

PotentialSpec uncertified(const PairPotential& potential, const CubeGrid& grid) {
    auto r = evaluate(potential, grid, false);
    if (auto* rej = std::get_if<Rejection>(&r)) throw CertificationError(*rej);
    return std::get<PotentialSpec>(std::move(r));
}

// ---------------------------------------------------------------------------

LocalEnergy::LocalEnergy(PotentialSpec spec, Window window, const DiscreteMeasure& xi)
    : spec_(std::move(spec)),
      window_(std::move(window)),
      xi_(spec_.grid.dimension()),
      profile_(spec_.potential.profile()),
      eta_index_(spec_.grid),
      xi_index_(spec_.grid) {
    if (window_.dimension() != spec_.grid.dimension()) throw std::invalid_argument("LocalEnergy: dimension mismatch");
    if (xi.dimension() != 0 && xi.dimension() != window_.dimension())
        throw std::invalid_argument("LocalEnergy: boundary dimension mismatch");
    if (profile_) {
        eval_.profile = &*profile_;
    } else {
        custom_ = [p = spec_.potential](std::span<const double> x, std::span<const double> y) { return p(x, y); };
        eval_.custom = &custom_;
    }
    const IndexHull hull = index_hull(window_, spec_.grid);
    std::vector<double> x(static_cast<std::size_t>(window_.dimension()));
    for (std::size_t i = 0; i < xi.size(); ++i) {
        xi.position(i, x);
        if (!hull.in_shell(x, spec_.grid, window_)) continue;
        xi_.add(x, xi.mark(i));
        xi_index_.insert(xi_.size() - 1, x, xi.mark(i));
    }
}

void LocalEnergy::reset(const DiscreteMeasure& eta) {
    eta_index_.clear();
    std::vector<double> x(static_cast<std::size_t>(window_.dimension()));
    for (std::size_t i = 0; i < eta.size(); ++i) {
        eta.position(i, x);
        eta_index_.insert(i, x, eta.mark(i));
    }
}

double LocalEnergy::config_field(std::span<const double> x, std::optional<std::size_t> skip) const {
    return eta_index_.field(x, eval_, skip);
}

double LocalEnergy::boundary_field(std::span<const double> x) const { return xi_index_.field(x, eval_); }

double LocalEnergy::diagonal(std::span<const double> x) const {
    return spec_.include_diagonal ? spec_.self_value(x) : 0.0;
}

double LocalEnergy::hamiltonian(const DiscreteMeasure& eta) const {
    double h = 0.0;
    std::vector<double> x(static_cast<std::size_t>(window_.dimension()));
    for (std::size_t i = 0; i < eta.size(); ++i) {
        eta.position(i, x);
        const double s = eta.mark(i);
        const double inner = spec_.include_diagonal ? config_field(x) : config_field(x, i);
        h += s * (inner + 2.0 * boundary_field(x));
    }
    return h;
}

double LocalEnergy::increment(const DiscreteMeasure& eta, const Move& move) const {
    if (const auto* b = std::get_if<Birth>(&move)) {
        const double s = b->s;
        return diagonal(b->x) * s * s + 2.0 * s * (config_field(b->x) + boundary_field(b->x));
    }
    if (const auto* d = std::get_if<Death>(&move)) {
        if (d->id >= eta.size()) throw std::out_of_range("energy increment: unknown atom id");
        const auto x = eta.position(d->id);
        const double s = eta.mark(d->id);
        return -(diagonal(x) * s * s + 2.0 * s * (config_field(x, d->id) + boundary_field(x)));
    }
    const auto& r = std::get<Resize>(move);
    if (r.id >= eta.size()) throw std::out_of_range("energy increment: unknown atom id");
    const auto x = eta.position(r.id);
    const double s = eta.mark(r.id);
    return (r.s_new * r.s_new - s * s) * diagonal(x) + 2.0 * (r.s_new - s) * (config_field(x, r.id) + boundary_field(x));
}

void LocalEnergy::apply(DiscreteMeasure& eta, const Move& move) {
    if (const auto* b = std::get_if<Birth>(&move)) {
        eta.add(b->x, b->s);
        eta_index_.insert(eta.size() - 1, b->x, b->s);
        return;
    }
    if (const auto* d = std::get_if<Death>(&move)) {
        if (d->id >= eta.size()) throw std::out_of_range("apply: unknown atom id");
        const std::size_t last = eta.size() - 1;
        eta_index_.erase(d->id);
        if (d->id != last) eta_index_.relabel(last, d->id);
        eta.swap_remove(d->id);
        return;
    }
    const auto& r = std::get<Resize>(move);
    if (r.id >= eta.size()) throw std::out_of_range("apply: unknown atom id");
    if (!(r.s_new > 0.0)) throw std::invalid_argument("apply: marks must be positive");
    eta.set_mark(r.id, r.s_new);
    eta_index_.set_mark(r.id, r.s_new);
}

// ---------------------------------------------------------------------------

namespace {

DiscreteMeasure restrict_to(const DiscreteMeasure& eta, const Window& window) {
    DiscreteMeasure out = eta.restrict_where([&](std::span<const double> x) { return window.contains(x); });
    out.set_window(window);
    return out;
}

}  // namespace

double hamiltonian(const DiscreteMeasure& eta, const DiscreteMeasure& xi, const Window& window,
                   const PotentialSpec& spec) {
    const DiscreteMeasure inner = restrict_to(eta, window);
    LocalEnergy e(spec, window, xi);
    e.reset(inner);
    return e.hamiltonian(inner);
}

double energy_increment(const DiscreteMeasure& eta, const DiscreteMeasure& xi, const Window& window,
                        const PotentialSpec& spec, const Move& move) {
    LocalEnergy e(spec, window, xi);
    e.reset(eta);
    return e.increment(eta, move);
}

namespace {

std::unordered_map<CubeIndex, double, CubeIndexHash> cube_masses(const DiscreteMeasure& m, const CubeGrid& grid,
                                                                 const std::function<bool(std::span<const double>)>& keep) {
    std::unordered_map<CubeIndex, double, CubeIndexHash> out;
    std::vector<double> x(static_cast<std::size_t>(grid.dimension()));
    for (std::size_t i = 0; i < m.size(); ++i) {
        m.position(i, x);
        if (keep(x)) out[cube_index(x, grid)] += m.mark(i);
    }
    return out;
}

}  // namespace

double stability_lower_bound(const DiscreteMeasure& eta, const DiscreteMeasure& xi, const Window& window,
                             const PotentialSpec& spec) {
    const auto& grid = spec.grid;
    const IndexHull hull = index_hull(window, grid);
    const auto inside = [&](std::span<const double> x) { return window.contains(x); };
    const auto outside = [&](std::span<const double> x) { return !window.contains(x); };
    const auto eta_m = cube_masses(eta, grid, inside);
    const auto xi_m = cube_masses(xi, grid, outside);
    double se = 0.0, sx = 0.0;
    for (const auto& k : hull.interior)
        if (auto it = eta_m.find(k); it != eta_m.end()) se += it->second * it->second;
    for (const auto& l : hull.shell)
        if (auto it = xi_m.find(l); it != xi_m.end()) sx += it->second * it->second;
    const double mb = spec.m_phi * spec.b;
    return (spec.A_delta - 2.0 * mb) * se - mb * sx;
}

double stability_lower_bound_cube(const DiscreteMeasure& eta, const DiscreteMeasure& xi, const CubeIndex& k,
                                  const PotentialSpec& spec) {
    const auto& grid = spec.grid;
    const auto in_k = [&](std::span<const double> x) { return cube_index(x, grid) == k; };
    const double ek = eta.mass_where(in_k);
    const auto xi_m = cube_masses(xi, grid, [&](std::span<const double> x) { return !in_k(x); });
    double sx = 0.0;
    for (const auto& j : neighbor_indices(k, grid))
        if (auto it = xi_m.find(j); it != xi_m.end()) sx += it->second * it->second;
    return (spec.A_delta - spec.m_phi * spec.b) * ek * ek - spec.b * sx;
}

double gnz_weight(double s, std::span<const double> x, const DiscreteMeasure& eta, const PotentialSpec& spec,
                  GnzWeight variant) {
    double sum = 0.0;
    std::vector<double> y(static_cast<std::size_t>(eta.dimension()));
    for (std::size_t i = 0; i < eta.size(); ++i) {
        eta.position(i, y);
        sum += eta.mark(i) * spec.phi(x, y);
    }
    double w = 2.0 * s * sum;
    if (variant == GnzWeight::Literal) w += spec.self_value(x) * s * s;
    return w;
}

// ---------------------------------------------------------------------------

double BoundConstants::log_C_lambda(double lambda, std::optional<double> delta_fraction) const {
    if (!(lambda >= 0.0)) throw BoundsError("log_C_lambda: lambda must be nonnegative");
    if (lambda > lambda0 * (1.0 + 1e-12)) throw BoundsError("log_C_lambda: lambda exceeds lambda0");
    // E exp(lambda eta^2) is increasing in lambda, so a lambda the chain of
    // estimates cannot reach directly inherits the bound at lambda0.
    const double lam = B_eps < lambda ? lambda : lambda0;
    if (!(B_eps < lam)) throw BoundsError("log_C_lambda: eps_h not admissible (B_eps >= lambda0)");
    const double lo = B_eps / lam;
    const double frac = delta_fraction.value_or(0.5 * (1.0 + lo));
    if (!(frac > lo && frac < 1.0)) throw BoundsError("log_C_lambda: delta_fraction outside (B_eps/lambda, 1)");
    return Upsilon_eps / (1.0 - frac);
}

double BoundConstants::dobrushin_bound(double lambda, double neighbor_boundary_sq) const {
    if (!(lambda > 0.0)) throw BoundsError("dobrushin_bound: lambda must be positive");
    return (Upsilon_eps + (B_eps / m_phi) * neighbor_boundary_sq) / lambda;
}

double default_eps_h(const PotentialSpec& spec, double theta) {
    const double g = spec.grid.edge();
    const double C_phi = theta * std::pow(g, spec.grid.dimension()) * spec.sup_norm;
    const double lambda0 = spec.A_delta - spec.m_phi * spec.b;
    const double room = lambda0 / spec.m_phi - spec.b;
    if (!(room > 0.0) || !(C_phi > 0.0)) return 1.0;
    return 0.5 * room / C_phi;
}

BoundConstants bound_constants(const PotentialSpec& spec, double theta, double eps_h, const Window& window) {
    if (!(eps_h > 0.0)) throw BoundsError("bound_constants: eps_h must be positive");
    if (!(theta > 0.0)) throw BoundsError("bound_constants: theta must be positive");
    const auto& grid = spec.grid;
    const double gd = std::pow(grid.edge(), grid.dimension());
    BoundConstants c;
    c.eps_h = eps_h;
    c.m_phi = spec.m_phi;
    c.C_Delta = 2.0 * theta * static_cast<double>(index_hull(window, grid).interior.size()) * gd;
    c.C_phi = theta * gd * spec.sup_norm;
    c.Upsilon_eps = c.C_phi * (4.0 * theta * gd + spec.m_phi / eps_h);
    c.B_eps = (spec.b + eps_h * c.C_phi) * spec.m_phi;
    c.lambda0 = spec.A_delta - spec.m_phi * spec.b;
    c.lambda0_zero_bc = spec.A_delta - 2.0 * spec.m_phi * spec.b;
    c.lambda_min = spec.m_phi * spec.b;
    c.vartheta = spec.range / grid.edge() + std::sqrt(static_cast<double>(grid.dimension()));
    if (!(c.lambda0 > c.lambda_min))
        throw BoundsError("bound_constants: empty admissible interval (repulsion margin A - 2 m b <= 0)");
    c.eps_admissible = c.B_eps < c.lambda0;
    return c;
}

}  // namespace gammagibbs
