#include "gammagibbs/levy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gammagibbs/rng.hpp"
#include "gammagibbs/special.hpp"

namespace gammagibbs {

namespace {

constexpr std::size_t kTableKnots = 4096;

// int_a^b f over a subinterval of (0, inf); [0, 1] is mapped through s = e^{-u}
// so integrable singularities at the origin are harmless.
double integrate_marks(const std::function<double(double)>& f, double a, double b) {
    if (!(b > a)) return 0.0;
    double total = 0.0;
    if (a < 1.0) {
        const double hi = std::min(b, 1.0);
        const double u_hi = a > 0.0 ? -std::log(a) : INFINITY;
        const double u_lo = -std::log(hi);
        // s underflows to 0 far out in u, where s f(s) may be 0 * inf.
        total += special::integrate(
            [&](double u) {
                const double s = std::exp(-u);
                return s > 0.0 ? f(s) * s : 0.0;
            },
            u_lo, u_hi);
    }
    if (b > 1.0) total += special::integrate(f, std::max(a, 1.0), b);
    return total;
}

}  // namespace

struct LevySpec::InversionTable {
    std::vector<double> log_knots;   // log s_i, ascending
    std::vector<double> cumulative;  // int_{s_0}^{s_i} lambda
    double tail_loss = 0.0;
    double max_error = 0.0;

    double sample(double u) const {
        const double target = u * cumulative.back();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        std::size_t i = static_cast<std::size_t>(std::distance(cumulative.begin(), it));
        i = std::clamp<std::size_t>(i, 1, cumulative.size() - 1);
        const double c0 = cumulative[i - 1], c1 = cumulative[i];
        const double t = c1 > c0 ? (target - c0) / (c1 - c0) : 0.0;
        return std::exp(log_knots[i - 1] + t * (log_knots[i] - log_knots[i - 1]));
    }
};

LevySpec LevySpec::gamma(double theta, double trunc) {
    if (!(theta > 0.0) || !std::isfinite(theta)) throw std::invalid_argument("gamma intensity needs theta > 0");
    if (!(trunc >= 0.0) || !std::isfinite(trunc)) throw std::invalid_argument("truncation threshold must be >= 0");
    LevySpec s;
    s.kind_ = LevyKind::Gamma;
    s.theta_ = theta;
    s.trunc_ = trunc;
    s.first_moment_ = theta;
    s.second_moment_ = theta;
    if (trunc > 0.0) {
        const double tail = special::expint_e1(std::max(trunc, 1.0));
        const double head = trunc < 1.0 ? special::expint_e1(trunc) - tail : 0.0;
        s.p_head_ = head / (head + tail);
        s.mass_cache_ = theta * (head + tail);
    }
    return s;
}

LevySpec LevySpec::generic(std::function<double(double)> density, double first_moment, double second_moment,
                           double trunc) {
    if (!density) throw std::invalid_argument("generic intensity needs a density");
    if (!(trunc >= 0.0) || !std::isfinite(trunc)) throw std::invalid_argument("truncation threshold must be >= 0");
    if (!std::isfinite(first_moment) || !std::isfinite(second_moment))
        throw std::invalid_argument("generic intensity needs finite first and second moments");

    const double m1 = integrate_marks([&](double s) { return s * density(s); }, 0.0, INFINITY);
    const double m2 = integrate_marks([&](double s) { return s * s * density(s); }, 0.0, INFINITY);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    if (!(rel(first_moment, m1) <= 1e-6) || !(rel(second_moment, m2) <= 1e-6))
        throw std::invalid_argument("generic intensity moments disagree with quadrature of the density");

    LevySpec s;
    s.kind_ = LevyKind::Generic;
    s.trunc_ = trunc;
    s.first_moment_ = first_moment;
    s.second_moment_ = second_moment;
    s.density_ = std::move(density);
    if (trunc > 0.0) {
        auto table = std::make_shared<InversionTable>();
        const auto& f = s.density_;
        const double total = integrate_marks(f, trunc, INFINITY);
        double s_max = std::max(1.0, 10.0 * trunc);
        while (s_max < 1e6 && integrate_marks(f, s_max, INFINITY) > 1e-14 * total) s_max *= 2.0;
        table->tail_loss = integrate_marks(f, s_max, INFINITY);

        const double l0 = std::log(trunc), l1 = std::log(s_max);
        table->log_knots.resize(kTableKnots);
        table->cumulative.resize(kTableKnots);
        for (std::size_t i = 0; i < kTableKnots; ++i)
            table->log_knots[i] = l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(kTableKnots - 1);
        table->log_knots.back() = l1;
        table->cumulative[0] = 0.0;
        for (std::size_t i = 1; i < kTableKnots; ++i) {
            // piecewise integral in log-space: int lambda(s) ds = int lambda(e^v) e^v dv
            const double piece = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                [&](double v) { const double x = std::exp(v); return f(x) * x; }, table->log_knots[i - 1],
                table->log_knots[i], 0, 0.0);
            table->cumulative[i] = table->cumulative[i - 1] + piece;
        }
        // accuracy of the linear-in-log interpolant at interval midpoints
        double worst = 0.0;
        const double tab_total = table->cumulative.back();
        for (std::size_t i = 1; i < kTableKnots; i += 7) {
            const double mid = 0.5 * (table->log_knots[i - 1] + table->log_knots[i]);
            const double exact = table->cumulative[i - 1] +
                                 boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                                     [&](double v) { const double x = std::exp(v); return f(x) * x; },
                                     table->log_knots[i - 1], mid, 0, 0.0);
            const double interp = 0.5 * (table->cumulative[i - 1] + table->cumulative[i]);
            worst = std::max(worst, std::abs(interp - exact) / tab_total);
        }
        table->max_error = worst;
        s.table_ = std::move(table);
    }
    return s;
}

double LevySpec::density(double s) const {
    if (!(s > 0.0)) return 0.0;
    if (kind_ == LevyKind::Gamma) return theta_ * std::exp(-s) / s;
    return scale_ * density_(s);
}

LevySpec LevySpec::with_trunc(double trunc) const {
    if (kind_ == LevyKind::Gamma) return gamma(theta_, trunc);
    LevySpec s = generic(density_, first_moment_ / scale_, second_moment_ / scale_, trunc);
    s.scale_ = scale_;
    s.first_moment_ = first_moment_;
    s.second_moment_ = second_moment_;
    return s;
}

LevySpec LevySpec::scaled(double factor) const {
    if (!(factor > 0.0)) throw std::invalid_argument("intensity scale must be positive");
    if (kind_ == LevyKind::Gamma) return gamma(theta_ * factor, trunc_);
    LevySpec s = *this;
    s.scale_ *= factor;
    s.first_moment_ *= factor;
    s.second_moment_ *= factor;
    return s;
}

double LevySpec::table_tail_loss() const { return table_ ? scale_ * table_->tail_loss : 0.0; }
double LevySpec::table_max_error() const { return table_ ? table_->max_error : 0.0; }

// ---------------------------------------------------------------------------

double truncated_mass(const LevySpec& spec) {
    const double eps = spec.trunc_;
    if (!(eps > 0.0)) throw InfiniteMassError("truncated_mass: the intensity has infinite mass without truncation");
    if (spec.kind_ == LevyKind::Gamma) return spec.mass_cache_;
    return spec.scale_ * (spec.table_->cumulative.back());
}

TruncationBias truncation_bias(const LevySpec& spec, double window_volume) {
    const double eps = spec.trunc();
    if (!(eps > 0.0)) return {};
    if (spec.is_gamma()) {
        const double th = spec.theta();
        return {th * window_volume * (-std::expm1(-eps)),
                th * window_volume * (-std::expm1(-eps) - eps * std::exp(-eps))};
    }
    const auto mean = integrate_marks([&](double s) { return s * spec.density(s); }, 0.0, eps);
    const auto var = integrate_marks([&](double s) { return s * s * spec.density(s); }, 0.0, eps);
    return {window_volume * mean, window_volume * var};
}

TruncationBias truncation_bias(const LevySpec& spec, const Window& window) {
    return truncation_bias(spec, window.volume());
}

double sample_mark(const LevySpec& spec, Rng& rng) {
    const double eps = spec.trunc_;
    if (!(eps > 0.0)) throw InfiniteMassError("sample_mark: truncation threshold must be positive");
    if (spec.kind_ == LevyKind::Generic) return spec.table_->sample(rng.uniform());

    // Pick the piece by its exact mass, then sample its conditional law.
    // On [eps, 1]: log-uniform proposal, accept w.p. e^{-s}.
    // On (s0, inf), s0 = max(eps, 1): shifted exponential, accept w.p. s0/s.
    const double s0 = std::max(eps, 1.0);
    const double log_eps = std::log(eps);
    if (rng.uniform() < spec.p_head_) {
        for (;;) {
            const double s = std::exp(log_eps * (1.0 - rng.uniform()));
            if (s < eps || s > 1.0) continue;
            if (rng.uniform() < std::exp(-s)) return s;
        }
    }
    for (;;) {
        const double s = s0 + rng.exponential();
        if (rng.uniform() * s < s0) return s;
    }
}

double sample_size_biased_mark(const LevySpec& spec, Rng& rng) {
    if (!spec.is_gamma()) throw std::invalid_argument("size-biased marks are available for the gamma kind only");
    return spec.trunc() + rng.exponential();
}

double truncated_first_moment(const LevySpec& spec) {
    if (spec.is_gamma()) return spec.theta() * std::exp(-spec.trunc());
    return integrate_marks([&](double s) { return s * spec.density(s); }, spec.trunc(), INFINITY);
}

DiscreteMeasure sample_gamma_measure(const LevySpec& spec, const Window& window, Rng& rng) {
    DiscreteMeasure eta(window.dimension(), window);
    if (window.empty()) return eta;
    const double nu = truncated_mass(spec) * window.volume();
    const auto n = rng.poisson(nu);
    eta.reserve(n);
    std::vector<double> x(static_cast<std::size_t>(window.dimension()));
    for (std::uint64_t i = 0; i < n; ++i) {
        window.sample_point(rng, x);
        eta.add(x, sample_mark(spec, rng));
    }
    // Coincident positions have probability zero; redraw if one ever occurs.
    while (eta.has_duplicate_positions()) {
        DiscreteMeasure sorted = eta;
        sorted.canonicalize();
        DiscreteMeasure fixed(window.dimension(), window);
        std::vector<double> prev;
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            auto p = sorted.position(i);
            if (p == prev) window.sample_point(rng, p);
            fixed.add(p, sorted.mark(i));
            prev = sorted.position(i);
        }
        eta = std::move(fixed);
    }
    return eta;
}

}  // namespace gammagibbs
